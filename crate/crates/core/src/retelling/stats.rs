use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest number of nonzero differences for which the exact null
/// distribution is used.
pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsError {
    #[error("every paired difference is zero")]
    AllZeroDifferences,
    #[error("empty sample")]
    EmptyInput,
    #[error("sample contains NaN or infinite values")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    /// Normal approximation with tie and continuity correction.
    Normal,
}

/// What to do with pairs whose difference is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroHandling {
    /// Drop them before ranking.
    #[default]
    Discard,
    /// Rank them with the rest, then leave their ranks out of both sums.
    Pratt,
}

impl ZeroHandling {
    pub fn as_str(self) -> &'static str {
        match self {
            ZeroHandling::Discard => "discard",
            ZeroHandling::Pratt => "pratt",
        }
    }
}

impl core::fmt::Display for ZeroHandling {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for ZeroHandling {
    type Err = alloc::string::String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "discard" => Ok(ZeroHandling::Discard),
            "pratt" => Ok(ZeroHandling::Pratt),
            other => Err(alloc::format!("unknown zero handling {other:?}, expected discard or pratt")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Rank sum of positive differences.
    pub w_plus: f64,
    /// Rank sum of negative differences.
    pub w_minus: f64,
    /// min(W+, W-).
    pub statistic: f64,
    /// Nonzero differences.
    pub n_used: usize,
    /// Zero differences.
    pub n_zero: usize,
    pub zero_handling: ZeroHandling,
    pub p_value: f64,
    pub method: PValueMethod,
}

/// 1-based ranks with ties given their average rank, returned doubled so
/// they are integers.
fn doubled_midranks(values: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        // positions start..=end hold ranks start+1..=end+1
        let doubled = (start + 1 + end + 1) as u64;
        for &i in &order[start..=end] {
            ranks[i] = doubled;
        }
        start = end + 1;
    }
    ranks
}

/// Two-sided Wilcoxon signed-rank test on paired samples `(a, b)` with
/// differences `a - b`, discarding zero differences.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<WilcoxonResult, StatsError> {
    wilcoxon_signed_rank_with(pairs, ZeroHandling::Discard)
}

/// [`wilcoxon_signed_rank`] with a choice of zero handling.
///
/// Up to [`EXACT_MAX_N`] nonzero differences the p-value comes from the
/// exact distribution of W+ over all sign assignments of the observed
/// (possibly tied) ranks; beyond that a normal approximation is used.
pub fn wilcoxon_signed_rank_with(
    pairs: &[(f64, f64)],
    zeros: ZeroHandling,
) -> Result<WilcoxonResult, StatsError> {
    if pairs.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    if zeros == ZeroHandling::Discard {
        diffs.retain(|d| *d != 0.0);
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let mut ranked: Vec<(f64, u64)> = diffs.into_iter().zip(doubled_midranks(&magnitudes)).collect();
    ranked.retain(|(d, _)| *d != 0.0);
    let n = ranked.len();
    if n == 0 {
        return Err(StatsError::AllZeroDifferences);
    }
    let ranks: Vec<u64> = ranked.iter().map(|(_, r)| *r).collect();
    let plus2: u64 = ranked.iter().filter(|(d, _)| *d > 0.0).map(|(_, r)| r).sum();
    let total2: u64 = ranks.iter().sum();
    let minus2 = total2 - plus2;
    let stat2 = plus2.min(minus2);

    let (p_value, method) = if n <= EXACT_MAX_N {
        // counts[s] = number of sign assignments with doubled W+ == s
        let mut counts = vec![0u64; total2 as usize + 1];
        counts[0] = 1;
        let mut reach = 0usize;
        for &r in &ranks {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] != 0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let tail: u64 = counts[..=stat2 as usize].iter().sum();
        let p = 2.0 * tail as f64 / libm::ldexp(1.0, n as i32);
        (p.min(1.0), PValueMethod::Exact)
    } else {
        // Under random signs W+ has mean sum(r)/2 and variance sum(r^2)/4,
        // which already accounts for ties and Pratt's dropped ranks.
        let mean = total2 as f64 / 4.0;
        let var = ranks.iter().map(|r| (r * r) as f64).sum::<f64>() / 16.0;
        let w_plus = plus2 as f64 / 2.0;
        let z = ((w_plus - mean).abs() - 0.5).max(0.0) / libm::sqrt(var);
        let p = libm::erfc(z / core::f64::consts::SQRT_2);
        (p.min(1.0), PValueMethod::Normal)
    };

    Ok(WilcoxonResult {
        w_plus: plus2 as f64 / 2.0,
        w_minus: minus2 as f64 / 2.0,
        statistic: stat2 as f64 / 2.0,
        n_used: n,
        n_zero: pairs.len() - n,
        zero_handling: zeros,
        p_value,
        method,
    })
}

/// Cliff's delta: P(x > y) - P(x < y) over all cross pairs.
pub fn cliffs_delta(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.is_empty() || ys.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut sorted = ys.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut dominance: i64 = 0;
    for x in xs {
        let below = sorted.partition_point(|y| y < x);
        let not_above = sorted.partition_point(|y| y <= x);
        let above = sorted.len() - not_above;
        dominance += below as i64 - above as i64;
    }
    Ok(dominance as f64 / (xs.len() * ys.len()) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_differences() {
        assert_eq!(
            wilcoxon_signed_rank(&[(1.0, 1.0), (2.0, 2.0)]),
            Err(StatsError::AllZeroDifferences)
        );
    }

    #[test]
    fn three_pair_example() {
        // diffs -1, -2, +2 -> ranks 1, 2.5, 2.5
        let r = wilcoxon_signed_rank(&[(1.0, 2.0), (2.0, 4.0), (3.0, 1.0)]).unwrap();
        assert_eq!(r.w_plus, 2.5);
        assert_eq!(r.w_minus, 3.5);
        assert_eq!(r.statistic, 2.5);
        // W+ over 8 sign patterns: 0,1,2.5,2.5,3.5,3.5,5,6; P(W+ <= 2.5) = 4/8
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.method, PValueMethod::Exact);
    }

    #[test]
    fn extreme_twenty_pairs() {
        let pairs: Vec<_> = (0..20).map(|i| (i as f64 + 1.0, i as f64)).collect();
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!(r.w_minus, 0.0);
        assert_eq!(r.p_value, 2.0 / 1_048_576.0);
    }

    #[test]
    fn normal_branch_is_sane() {
        let pairs: Vec<_> = (0..30).map(|i| (i as f64 * 0.5, if i % 3 == 0 { i as f64 } else { 0.0 })).collect();
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!(r.method, PValueMethod::Normal);
        assert!(r.p_value > 0.0 && r.p_value <= 1.0);
    }

    #[test]
    fn pratt_keeps_zero_ranks_out_of_the_sums() {
        // diffs 0, +1, -2, +3: Pratt ranks 2, 3, 4 for the nonzero ones
        let pairs = [(1.0, 1.0), (2.0, 1.0), (1.0, 3.0), (4.0, 1.0)];
        let d = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!((d.w_plus, d.w_minus, d.n_zero), (4.0, 2.0, 1));
        let p = wilcoxon_signed_rank_with(&pairs, ZeroHandling::Pratt).unwrap();
        assert_eq!((p.w_plus, p.w_minus, p.n_used, p.n_zero), (6.0, 3.0, 3, 1));
        // W+ over 8 sign patterns of {2, 3, 4}: 0,2,3,4,5,6,7,9; P(W+ <= 3) = 3/8
        assert_eq!(p.p_value, 0.75);
        assert_eq!(p.zero_handling, ZeroHandling::Pratt);
    }

    #[test]
    fn zero_handling_round_trips() {
        for z in [ZeroHandling::Discard, ZeroHandling::Pratt] {
            assert_eq!(z.as_str().parse::<ZeroHandling>(), Ok(z));
        }
        assert!("wilcox".parse::<ZeroHandling>().is_err());
    }

    #[test]
    fn cliffs_examples() {
        assert_eq!(cliffs_delta(&[1.0, 2.0], &[1.0, 3.0]).unwrap(), -0.25);
        assert_eq!(cliffs_delta(&[3.0, 4.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(cliffs_delta(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(cliffs_delta(&[], &[1.0]), Err(StatsError::EmptyInput));
    }

    #[test]
    fn midranks() {
        assert_eq!(doubled_midranks(&[1.0, 2.0, 2.0]), [2, 5, 5]);
        assert_eq!(doubled_midranks(&[3.0, 3.0, 3.0, 1.0]), [6, 6, 6, 2]);
    }
}
