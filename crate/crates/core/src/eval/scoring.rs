use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::SkillId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLabel {
    pub present: bool,
    pub explanation: Option<String>,
}

/// Gold labels keyed by `(episode_id, skill_id)`. Every episode present in
/// the set has a label for all ten skills.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GoldLabelSet {
    labels: BTreeMap<(String, SkillId), GoldLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoringError {
    #[error("episode `{episode}` has no gold label for {missing:?}")]
    IncompleteEpisode { episode: String, missing: Vec<SkillId> },
    #[error("duplicate label for ({0}, {1})")]
    DuplicateLabel(String, SkillId),
    #[error("predictions missing {} gold pairs, first: {:?}", .0.len(), .0.first())]
    KeyMismatch(Vec<(String, SkillId)>),
    #[error("gold label set is empty")]
    Empty,
}

impl GoldLabelSet {
    pub fn new<I>(labels: I) -> Result<Self, ScoringError>
    where
        I: IntoIterator<Item = ((String, SkillId), GoldLabel)>,
    {
        let mut map = BTreeMap::new();
        for (key, label) in labels {
            if map.contains_key(&key) {
                return Err(ScoringError::DuplicateLabel(key.0, key.1));
            }
            map.insert(key, label);
        }
        let set = GoldLabelSet { labels: map };
        for episode in set.episodes() {
            let missing: Vec<SkillId> = SkillId::ALL
                .into_iter()
                .filter(|id| !set.labels.contains_key(&(episode.clone(), *id)))
                .collect();
            if !missing.is_empty() {
                return Err(ScoringError::IncompleteEpisode { episode, missing });
            }
        }
        Ok(set)
    }

    pub fn episodes(&self) -> BTreeSet<String> {
        self.labels.keys().map(|(e, _)| e.clone()).collect()
    }

    pub fn get(&self, episode: &str, skill: SkillId) -> Option<&GoldLabel> {
        self.labels.get(&(String::from(episode), skill))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, SkillId), &GoldLabel)> {
        self.labels.iter()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Confusion counts and derived metrics with "present" as the positive
/// class. Ratios with a zero denominator are reported as 0.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SkillScore {
    pub true_positive: u64,
    pub false_positive: u64,
    pub false_negative: u64,
    pub true_negative: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl SkillScore {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        SkillScore {
            true_positive: tp,
            false_positive: fp,
            false_negative: fn_,
            true_negative: tn,
            accuracy: ratio(tp + tn, tp + fp + fn_ + tn),
            precision,
            recall,
            f1,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionScores {
    /// Per skill, in canonical order.
    pub per_skill: Vec<(SkillId, SkillScore)>,
    /// Counts pooled over every skill.
    pub overall: SkillScore,
    pub macro_accuracy: f64,
    pub macro_f1: f64,
}

impl DetectionScores {
    pub fn skill(&self, id: SkillId) -> &SkillScore {
        &self.per_skill[id.index()].1
    }
}

/// Scores binary predictions against gold labels, per skill.
pub fn score_detection(
    predictions: &BTreeMap<(String, SkillId), bool>,
    gold: &GoldLabelSet,
) -> Result<DetectionScores, ScoringError> {
    if gold.is_empty() {
        return Err(ScoringError::Empty);
    }
    let missing: Vec<(String, SkillId)> = gold
        .iter()
        .filter(|(key, _)| !predictions.contains_key(*key))
        .map(|(key, _)| key.clone())
        .collect();
    if !missing.is_empty() {
        return Err(ScoringError::KeyMismatch(missing));
    }
    let mut counts = [[0u64; 4]; 10];
    for (key, label) in gold.iter() {
        let predicted = predictions[key];
        let slot = match (predicted, label.present) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        counts[key.1.index()][slot] += 1;
    }
    let per_skill: Vec<(SkillId, SkillScore)> = SkillId::ALL
        .into_iter()
        .map(|id| {
            let [tp, fp, fn_, tn] = counts[id.index()];
            (id, SkillScore::from_counts(tp, fp, fn_, tn))
        })
        .collect();
    let pooled = counts.iter().fold([0u64; 4], |mut acc, c| {
        for (a, b) in acc.iter_mut().zip(c) {
            *a += b;
        }
        acc
    });
    let n = per_skill.len() as f64;
    Ok(DetectionScores {
        macro_accuracy: per_skill.iter().map(|(_, s)| s.accuracy).sum::<f64>() / n,
        macro_f1: per_skill.iter().map(|(_, s)| s.f1).sum::<f64>() / n,
        overall: SkillScore::from_counts(pooled[0], pooled[1], pooled[2], pooled[3]),
        per_skill,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn gold_from(present: impl Fn(usize, SkillId) -> bool, episodes: usize) -> GoldLabelSet {
        GoldLabelSet::new((0..episodes).flat_map(|e| {
            let present = &present;
            SkillId::ALL.into_iter().map(move |id| {
                (
                    (format!("ep{e}"), id),
                    GoldLabel {
                        present: present(e, id),
                        explanation: None,
                    },
                )
            })
        }))
        .unwrap()
    }

    #[test]
    fn perfect_predictions() {
        let gold = gold_from(|e, id| (e + id.index()) % 3 == 0, 6);
        let preds = gold.iter().map(|(k, l)| (k.clone(), l.present)).collect();
        let s = score_detection(&preds, &gold).unwrap();
        for (_, score) in &s.per_skill {
            assert_eq!(score.accuracy, 1.0);
            assert_eq!(score.f1, 1.0);
        }
    }

    #[test]
    fn hand_computed_counts() {
        let s = SkillScore::from_counts(3, 1, 2, 4);
        assert!((s.accuracy - 0.7).abs() < 1e-12);
        assert!((s.precision - 0.75).abs() < 1e-12);
        assert!((s.recall - 0.6).abs() < 1e-12);
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.f1 - 0.666667).abs() < 1e-6);
    }

    #[test]
    fn all_negative_predictions() {
        let gold = gold_from(|e, _| e % 2 == 0, 4);
        let preds = gold.iter().map(|(k, _)| (k.clone(), false)).collect();
        let s = score_detection(&preds, &gold).unwrap();
        for (_, score) in &s.per_skill {
            assert_eq!(score.f1, 0.0);
            assert_eq!(score.accuracy, 0.5);
        }
    }

    #[test]
    fn missing_prediction_is_key_mismatch() {
        let gold = gold_from(|_, _| true, 2);
        let mut preds: BTreeMap<_, _> = gold.iter().map(|(k, _)| (k.clone(), true)).collect();
        preds.remove(&("ep1".into(), SkillId::M1));
        assert_eq!(
            score_detection(&preds, &gold),
            Err(ScoringError::KeyMismatch(alloc::vec![("ep1".into(), SkillId::M1)]))
        );
    }

    #[test]
    fn incomplete_episode_rejected() {
        let err = GoldLabelSet::new([(
            ("ep".into(), SkillId::A1),
            GoldLabel {
                present: true,
                explanation: None,
            },
        )])
        .unwrap_err();
        assert!(matches!(err, ScoringError::IncompleteEpisode { missing, .. } if missing.len() == 9));
    }
}
