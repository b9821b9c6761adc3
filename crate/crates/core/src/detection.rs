//! Detection outcomes, per-episode reports, and single-skill selection.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::SkillId;

/// Binary presence of one skill in one transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionOutcome {
    pub skill_id: SkillId,
    pub present: bool,
    /// Set exactly when `present` is true.
    pub explanation: Option<String>,
    pub raw_response: String,
    /// Set when the outcome was forced to absent after the provider gave up.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl DetectionOutcome {
    /// Absent outcome recorded after every attempt failed.
    pub fn exhausted(skill_id: SkillId, diagnostic: String) -> Self {
        DetectionOutcome {
            skill_id,
            present: false,
            explanation: None,
            raw_response: String::new(),
            diagnostic: Some(diagnostic),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("report needs 10 outcomes, got {0}")]
    WrongOutcomeCount(usize),
    #[error("outcome #{index} is {found}, expected {expected}")]
    OutOfOrder {
        index: usize,
        found: SkillId,
        expected: SkillId,
    },
    #[error("outcome for {0} has present/explanation mismatch")]
    ExplanationMismatch(SkillId),
}

/// One outcome per skill, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub episode_id: String,
    pub outcomes: Vec<DetectionOutcome>,
}

impl DetectionReport {
    pub fn new(episode_id: String, outcomes: Vec<DetectionOutcome>) -> Result<Self, ReportError> {
        let report = DetectionReport {
            episode_id,
            outcomes,
        };
        report.validate()?;
        Ok(report)
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        if self.outcomes.len() != SkillId::ALL.len() {
            return Err(ReportError::WrongOutcomeCount(self.outcomes.len()));
        }
        for (index, (outcome, expected)) in self.outcomes.iter().zip(SkillId::ALL).enumerate() {
            if outcome.skill_id != expected {
                return Err(ReportError::OutOfOrder {
                    index,
                    found: outcome.skill_id,
                    expected,
                });
            }
            let has_expl = outcome
                .explanation
                .as_deref()
                .is_some_and(|e| !e.trim().is_empty());
            if has_expl != outcome.present {
                return Err(ReportError::ExplanationMismatch(outcome.skill_id));
            }
        }
        Ok(())
    }

    pub fn outcome(&self, id: SkillId) -> &DetectionOutcome {
        &self.outcomes[id.index()]
    }

    /// Skills detected as present, in canonical order.
    pub fn positives(&self) -> Vec<SkillId> {
        self.outcomes
            .iter()
            .filter(|o| o.present)
            .map(|o| o.skill_id)
            .collect()
    }
}

/// How one skill is chosen when several are detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionPolicy {
    FirstInOrder,
    #[default]
    SeededRandom,
}

/// Picks the single skill an episode's activities will target.
///
/// `SeededRandom` draws uniformly from the positives with a ChaCha8 stream
/// seeded by `seed`, so the choice depends only on the seed and the set of
/// positive ids.
pub fn select_skill(report: &DetectionReport, policy: SelectionPolicy, seed: u64) -> Option<SkillId> {
    let positives = report.positives();
    match (positives.len(), policy) {
        (0, _) => None,
        (_, SelectionPolicy::FirstInOrder) => positives.first().copied(),
        (n, SelectionPolicy::SeededRandom) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Some(positives[rng.random_range(0..n)])
        }
    }
}
