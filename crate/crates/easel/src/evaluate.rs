//! Report assembly behind `easel eval`.

use std::collections::BTreeMap;

use easel_core::eval::{
    explanation_similarity, krippendorff_alpha, percent_agreement, score_detection, AlphaResult, DetectionScores,
    Embedder, GoldLabelSet, QualityReport, RaterTable, SimilarityReport,
};
use serde::{Deserialize, Serialize};

use crate::formats::tables::{rater_table_from_labels, LabelMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub items: usize,
    pub percent_agreement: f64,
    pub krippendorff_alpha: AlphaResult,
}

pub fn agreement(table: &RaterTable) -> anyhow::Result<AgreementReport> {
    Ok(AgreementReport {
        items: table.items.len(),
        percent_agreement: percent_agreement(table)?,
        krippendorff_alpha: krippendorff_alpha(table)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub detection: DetectionScores,
    /// Gold vs. predicted labels treated as two raters.
    pub label_agreement: AgreementReport,
    /// Over pairs where both sides marked the skill present with an
    /// explanation. Absent when there are none.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explanation_similarity: Option<SimilarityReport>,
    pub explanation_pairs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rater_agreement: Option<AgreementReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annotations: Option<QualityReport>,
}

/// Scores predictions against gold and compares explanations where both
/// sides gave one.
pub fn evaluate_detection(gold: &LabelMap, pred: &LabelMap, embedder: &dyn Embedder) -> anyhow::Result<EvalReport> {
    let gold_set = GoldLabelSet::new(gold.clone())?;
    let predictions: BTreeMap<_, _> = pred.iter().map(|(k, v)| (k.clone(), v.present)).collect();
    let detection = score_detection(&predictions, &gold_set)?;
    let pairs: Vec<(String, String)> = gold
        .iter()
        .filter_map(|(key, g)| {
            let p = pred.get(key)?;
            match (g.present && p.present, &g.explanation, &p.explanation) {
                (true, Some(a), Some(b)) => Some((a.clone(), b.clone())),
                _ => None,
            }
        })
        .collect();
    let explanation_similarity =
        if pairs.is_empty() { None } else { Some(explanation_similarity(&pairs, embedder)?) };
    Ok(EvalReport {
        detection,
        label_agreement: agreement(&rater_table_from_labels(gold, pred)?)?,
        explanation_similarity,
        explanation_pairs: pairs.len(),
        rater_agreement: None,
        annotations: None,
    })
}
