use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Nominal ratings, one row per item and one column per rater. `None` marks
/// a missing rating.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RaterTable {
    pub items: Vec<String>,
    pub raters: Vec<String>,
    pub values: Vec<Vec<Option<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgreementError {
    #[error("need at least two raters and one item rated by two of them")]
    InsufficientRatings,
    #[error("row {row} has {found} ratings for {expected} raters")]
    RaggedRow { row: usize, found: usize, expected: usize },
}

impl RaterTable {
    pub fn new(
        items: Vec<String>,
        raters: Vec<String>,
        values: Vec<Vec<Option<u32>>>,
    ) -> Result<Self, AgreementError> {
        let table = RaterTable {
            items,
            raters,
            values,
        };
        table.check()?;
        Ok(table)
    }

    /// Two raters, fully observed binary columns.
    pub fn from_columns(a: &[bool], b: &[bool]) -> Result<Self, AgreementError> {
        let values = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| alloc::vec![Some(x as u32), Some(y as u32)])
            .collect();
        let items = (0..a.len().min(b.len()))
            .map(|i| alloc::format!("item{i}"))
            .collect();
        RaterTable::new(items, alloc::vec!["a".into(), "b".into()], values)
    }

    fn check(&self) -> Result<(), AgreementError> {
        if self.values.len() != self.items.len() {
            return Err(AgreementError::RaggedRow {
                row: self.values.len().min(self.items.len()),
                found: self.values.len(),
                expected: self.items.len(),
            });
        }
        for (row, ratings) in self.values.iter().enumerate() {
            if ratings.len() != self.raters.len() {
                return Err(AgreementError::RaggedRow {
                    row,
                    found: ratings.len(),
                    expected: self.raters.len(),
                });
            }
        }
        if self.raters.len() < 2 || self.pairable_units().next().is_none() {
            return Err(AgreementError::InsufficientRatings);
        }
        Ok(())
    }

    /// Observed values of each item rated at least twice.
    fn pairable_units(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.values
            .iter()
            .map(|row| row.iter().flatten().copied().collect::<Vec<_>>())
            .filter(|v| v.len() >= 2)
    }
}

/// Share of items rated at least twice on which every rating is equal.
pub fn percent_agreement(table: &RaterTable) -> Result<f64, AgreementError> {
    table.check()?;
    let (mut agree, mut total) = (0usize, 0usize);
    for unit in table.pairable_units() {
        total += 1;
        if unit.iter().all(|v| *v == unit[0]) {
            agree += 1;
        }
    }
    Ok(agree as f64 / total as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaResult {
    pub alpha: f64,
    /// Every pairable value was identical, so expected disagreement is zero
    /// and alpha is undefined; `alpha` is then reported as 1.
    pub no_variance: bool,
    /// Number of pairable values.
    pub pairable_values: usize,
}

/// Krippendorff's alpha for nominal data with missing values, computed from
/// the coincidence matrix.
pub fn krippendorff_alpha(table: &RaterTable) -> Result<AlphaResult, AgreementError> {
    table.check()?;
    let units: Vec<Vec<u32>> = table.pairable_units().collect();
    let mut categories: Vec<u32> = units.iter().flatten().copied().collect();
    categories.sort_unstable();
    categories.dedup();
    let k = categories.len();
    let index = |v: u32| categories.binary_search(&v).expect("value collected above");

    // o[c][d]: each ordered pair of values within a unit contributes
    // 1 / (m_u - 1).
    let mut coincidence = alloc::vec![alloc::vec![0.0f64; k]; k];
    for unit in &units {
        let weight = 1.0 / (unit.len() - 1) as f64;
        let mut counts = alloc::vec![0.0f64; k];
        for &v in unit {
            counts[index(v)] += 1.0;
        }
        for c in 0..k {
            for d in 0..k {
                let pairs = if c == d {
                    counts[c] * (counts[c] - 1.0)
                } else {
                    counts[c] * counts[d]
                };
                coincidence[c][d] += pairs * weight;
            }
        }
    }
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();
    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            if c != d {
                observed += coincidence[c][d];
                expected += marginals[c] * marginals[d];
            }
        }
    }
    let pairable_values = units.iter().map(Vec::len).sum();
    if expected == 0.0 {
        return Ok(AlphaResult {
            alpha: 1.0,
            no_variance: true,
            pairable_values,
        });
    }
    Ok(AlphaResult {
        alpha: 1.0 - (n - 1.0) * observed / expected,
        no_variance: false,
        pairable_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn table(rows: Vec<Vec<Option<u32>>>) -> RaterTable {
        let items = (0..rows.len()).map(|i| alloc::format!("i{i}")).collect();
        let raters = (0..rows[0].len()).map(|i| alloc::format!("r{i}")).collect();
        RaterTable::new(items, raters, rows).unwrap()
    }

    #[test]
    fn identical_columns() {
        let t = RaterTable::from_columns(&[true, false, true], &[true, false, true]).unwrap();
        assert_eq!(percent_agreement(&t).unwrap(), 1.0);
        let a = krippendorff_alpha(&t).unwrap();
        assert_eq!(a.alpha, 1.0);
        assert!(!a.no_variance);
    }

    #[test]
    fn two_disagreements_in_ten() {
        let a = [true, true, false, false, true, false, true, false, true, true];
        let mut b = a;
        b[3] = true;
        b[7] = true;
        let t = RaterTable::from_columns(&a, &b).unwrap();
        assert!((percent_agreement(&t).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn three_raters_partial_agreement_is_disagreement() {
        let t = table(vec![vec![Some(1), Some(1), Some(0)], vec![Some(1), Some(1), Some(1)]]);
        assert_eq!(percent_agreement(&t).unwrap(), 0.5);
    }

    #[test]
    fn single_ratings_are_not_pairable() {
        let t = table(vec![vec![Some(1), None], vec![Some(0), Some(0)]]);
        assert_eq!(percent_agreement(&t).unwrap(), 1.0);
        assert!(matches!(
            RaterTable::new(vec!["x".into()], vec!["a".into(), "b".into()], vec![vec![Some(1), None]]),
            Err(AgreementError::InsufficientRatings)
        ));
    }

    #[test]
    fn constant_values_flag_no_variance() {
        let t = table(vec![vec![Some(0), Some(0)], vec![Some(0), Some(0)]]);
        let a = krippendorff_alpha(&t).unwrap();
        assert!(a.no_variance);
        assert_eq!(a.alpha, 1.0);
    }

    #[test]
    fn textbook_two_rater_value() {
        // 2 raters, 10 items: (1,1)x3, (0,0)x5, (1,0), (0,1).
        // Pairable values n = 20, n1 = 8, n0 = 12, observed off-diagonal = 4.
        // alpha = 1 - 19 * 4 / (2 * 8 * 12) = 1 - 76/192.
        let a = [true, true, true, false, false, false, false, false, true, false];
        let b = [true, true, true, false, false, false, false, false, false, true];
        let t = RaterTable::from_columns(&a, &b).unwrap();
        let got = krippendorff_alpha(&t).unwrap().alpha;
        assert!((got - (1.0 - 76.0 / 192.0)).abs() < 1e-12, "{got}");
    }
}
