use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    cliffs_delta, extract_emotion_features, wilcoxon_signed_rank_with, Lexicon, LexiconError, ZeroHandling,
};
use super::{LexiconName, StatsError, WilcoxonResult};

/// Study condition of a session or retelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    NoActivity,
    EaselActivity,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::NoActivity => "no_activity",
            Condition::EaselActivity => "easel_activity",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "no_activity" | "NoActivity" => Ok(Condition::NoActivity),
            "easel_activity" | "EaselActivity" => Ok(Condition::EaselActivity),
            other => Err(alloc::format!("unknown condition `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetellingRecord {
    pub child_id: String,
    pub condition: Condition,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("child `{0}` lacks a retelling for one condition")]
    UnpairedChild(String),
    #[error("child `{0}` has two retellings for {1}")]
    DuplicateRecord(String, Condition),
    #[error("retelling of child `{child}`: {source}")]
    Features { child: String, source: LexiconError },
    #[error("no retellings")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryComparison {
    pub category: LexiconName,
    pub no_activity: ConditionSummary,
    pub easel_activity: ConditionSummary,
    /// Signed-rank test on (easel, no-activity) proportions, or the reason
    /// it could not run.
    pub wilcoxon: Result<WilcoxonResult, StatsError>,
    /// Positive when proportions are larger after the activity.
    pub cliffs_delta: f64,
    pub n_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Child ids in sorted order.
    pub children: Vec<String>,
    pub categories: Vec<CategoryComparison>,
}

impl ComparisonReport {
    pub fn category(&self, name: LexiconName) -> &CategoryComparison {
        &self.categories[name as usize]
    }
}

fn summarize(values: &[f64]) -> ConditionSummary {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() < 2 {
        0.0
    } else {
        libm::sqrt(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
    };
    ConditionSummary { mean, sd }
}

/// Paired comparison of emotion-word proportions between conditions, one
/// pair per child. Zero differences are discarded.
pub fn compare_conditions(
    records: &[RetellingRecord],
    lexicon: &Lexicon,
) -> Result<ComparisonReport, CompareError> {
    compare_conditions_with(records, lexicon, ZeroHandling::Discard)
}

pub fn compare_conditions_with(
    records: &[RetellingRecord],
    lexicon: &Lexicon,
    zeros: ZeroHandling,
) -> Result<ComparisonReport, CompareError> {
    if records.is_empty() {
        return Err(CompareError::Empty);
    }
    // child -> [no_activity, easel_activity]
    let mut by_child: BTreeMap<&str, [Option<&RetellingRecord>; 2]> = BTreeMap::new();
    for r in records {
        let slot = &mut by_child.entry(r.child_id.as_str()).or_default()[r.condition as usize];
        if slot.is_some() {
            return Err(CompareError::DuplicateRecord(r.child_id.clone(), r.condition));
        }
        *slot = Some(r);
    }
    let mut proportions: Vec<[[f64; 2]; 3]> = Vec::with_capacity(by_child.len());
    for (child, slots) in &by_child {
        let [Some(none), Some(easel)] = slots else {
            return Err(CompareError::UnpairedChild(String::from(*child)));
        };
        let features = |r: &RetellingRecord| {
            extract_emotion_features(&r.text, lexicon).map_err(|source| CompareError::Features {
                child: r.child_id.clone(),
                source,
            })
        };
        let (f_none, f_easel) = (features(none)?, features(easel)?);
        proportions.push(LexiconName::ALL.map(|name| {
            [
                f_none.category(name).proportion,
                f_easel.category(name).proportion,
            ]
        }));
    }
    let categories = LexiconName::ALL
        .into_iter()
        .enumerate()
        .map(|(c, name)| {
            let none: Vec<f64> = proportions.iter().map(|p| p[c][0]).collect();
            let easel: Vec<f64> = proportions.iter().map(|p| p[c][1]).collect();
            let pairs: Vec<(f64, f64)> = easel.iter().copied().zip(none.iter().copied()).collect();
            CategoryComparison {
                category: name,
                no_activity: summarize(&none),
                easel_activity: summarize(&easel),
                wilcoxon: wilcoxon_signed_rank_with(&pairs, zeros),
                cliffs_delta: cliffs_delta(&easel, &none).expect("non-empty finite proportions"),
                n_pairs: pairs.len(),
            }
        })
        .collect();
    Ok(ComparisonReport {
        children: by_child.keys().map(|c| String::from(*c)).collect(),
        categories,
    })
}
