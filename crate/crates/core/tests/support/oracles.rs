//! Brute-force reference implementations, written from the textbook
//! definitions and sharing no code with the library.
#![allow(dead_code)]

/// Nominal Krippendorff's alpha from the pairwise definition:
/// 1 - (n - 1) * sum_u [sum_{i != j in u} d_ij / (m_u - 1)] / sum_{i != j over all values} d_ij,
/// where only units with at least two ratings contribute values.
pub fn alpha_pairwise(rows: &[Vec<Option<u32>>]) -> Option<f64> {
    let units: Vec<Vec<u32>> = rows
        .iter()
        .map(|r| r.iter().filter_map(|v| *v).collect::<Vec<_>>())
        .filter(|u| u.len() >= 2)
        .collect();
    let all: Vec<u32> = units.iter().flatten().copied().collect();
    let n = all.len() as f64;
    if all.is_empty() {
        return None;
    }
    let mut within = 0.0;
    for u in &units {
        let mut d = 0.0;
        for i in 0..u.len() {
            for j in 0..u.len() {
                if i != j && u[i] != u[j] {
                    d += 1.0;
                }
            }
        }
        within += d / (u.len() as f64 - 1.0);
    }
    let mut between = 0.0;
    for i in 0..all.len() {
        for j in 0..all.len() {
            if i != j && all[i] != all[j] {
                between += 1.0;
            }
        }
    }
    if between == 0.0 {
        return None;
    }
    Some(1.0 - (n - 1.0) * within / between)
}

/// (accuracy, precision, recall, f1) with 0 for any empty denominator.
pub fn binary_scores(pairs: &[(bool, bool)]) -> (f64, f64, f64, f64) {
    let (mut tp, mut fp, mut fn_, mut tn) = (0.0, 0.0, 0.0, 0.0);
    for &(pred, gold) in pairs {
        match (pred, gold) {
            (true, true) => tp += 1.0,
            (true, false) => fp += 1.0,
            (false, true) => fn_ += 1.0,
            (false, false) => tn += 1.0,
        }
    }
    let div = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
    let f1 = div(2.0 * tp, 2.0 * tp + fp + fn_);
    (div(tp + tn, tp + fp + fn_ + tn), div(tp, tp + fp), div(tp, tp + fn_), f1)
}

/// Cosine via unit vectors.
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let (nu, nv) = (norm(u), norm(v));
    u.iter().zip(v).map(|(a, b)| (a / nu) * (b / nv)).sum()
}

/// Average ranks of `values` (1-based), by counting.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|x| {
            let less = values.iter().filter(|y| *y < x).count() as f64;
            let equal = values.iter().filter(|y| *y == x).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Exact two-sided signed-rank test by enumerating every sign assignment.
/// Returns (W+, W-, p).
pub fn wilcoxon_enumerated(pairs: &[(f64, f64)]) -> (f64, f64, f64) {
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    let ranks = midranks(&diffs.iter().map(|d| d.abs()).collect::<Vec<_>>());
    enumerate_signs(&diffs, &ranks)
}

/// Same, but zeros are ranked with everything else and then dropped.
pub fn wilcoxon_enumerated_pratt(pairs: &[(f64, f64)]) -> (f64, f64, f64) {
    let all: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    let all_ranks = midranks(&all.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let (diffs, ranks): (Vec<f64>, Vec<f64>) = all.iter().zip(&all_ranks).filter(|(d, _)| **d != 0.0).unzip();
    enumerate_signs(&diffs, &ranks)
}

fn enumerate_signs(diffs: &[f64], ranks: &[f64]) -> (f64, f64, f64) {
    let w_plus: f64 = diffs.iter().zip(ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total: f64 = ranks.iter().sum();
    let n = diffs.len();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= w_plus + 1e-9 {
            le += 1;
        }
        if w >= w_plus - 1e-9 {
            ge += 1;
        }
    }
    let all = (1u64 << n) as f64;
    let p = (2.0 * (le.min(ge) as f64) / all).min(1.0);
    (w_plus, total - w_plus, p)
}

/// Cliff's delta over every cross pair.
pub fn cliffs(xs: &[f64], ys: &[f64]) -> f64 {
    let mut s = 0i64;
    for x in xs {
        for y in ys {
            s += (x > y) as i64 - (x < y) as i64;
        }
    }
    s as f64 / (xs.len() * ys.len()) as f64
}
