//! The pipelined generation flow: per-skill detection, single-skill
//! selection, child activity and parent starter generation, and the episode
//! summary shown to parents.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use easel_core::detection::ReportError;
use easel_core::generation::{normalize_generation, split_examples};
use easel_core::prompting::{
    render_child_activity_prompt, render_detection_prompt, render_parent_prompt, render_summary_prompt,
    TemplateId,
};
use easel_core::{
    parse_detection_response, select_skill, ActivityType, ChildActivity, DetectionOutcome, DetectionReport,
    EpisodeSummary, ParentStarter, PromptError, RenderedPrompt, SelSkill, SelectionPolicy, SkillId,
    TaxonomyDataset, TemplateSet, Transcript,
};
use serde::{Deserialize, Serialize};

use crate::provider::{ChatProvider, DecodingParams, ProviderError, ProviderRequest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub backoff_initial_ms: f64,
    pub backoff_factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 3, backoff_initial_ms: 500.0, backoff_factor: 2.0 }
    }
}

impl RetryPolicy {
    /// No waiting between attempts.
    pub fn immediate(max_attempts: u32) -> Self {
        RetryPolicy { max_attempts, backoff_initial_ms: 0.0, backoff_factor: 1.0 }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.max_attempts < 1 {
            return Err(PipelineError::InvalidConfig("retry.max_attempts must be at least 1".into()));
        }
        if !(self.backoff_initial_ms >= 0.0 && self.backoff_initial_ms.is_finite()) {
            return Err(PipelineError::InvalidConfig("retry.backoff_initial_ms must be >= 0".into()));
        }
        if !(self.backoff_factor >= 1.0 && self.backoff_factor.is_finite()) {
            return Err(PipelineError::InvalidConfig("retry.backoff_factor must be >= 1".into()));
        }
        Ok(())
    }

    /// Wait before retry number `retry` (0-based).
    pub fn delay(&self, retry: u32) -> Duration {
        let ms = self.backoff_initial_ms * self.backoff_factor.powi(retry as i32);
        Duration::from_secs_f64(ms.min(60_000.0) / 1000.0)
    }
}

/// Which activity variants are generated for the selected skill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityPolicy {
    /// All four, so the child can pick one.
    #[default]
    ChildChoice,
    Fixed(ActivityType),
}

impl ActivityPolicy {
    pub fn activity_types(self) -> Vec<ActivityType> {
        match self {
            ActivityPolicy::ChildChoice => ActivityType::ALL.to_vec(),
            ActivityPolicy::Fixed(t) => vec![t],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub activity_policy: ActivityPolicy,
    pub selection: SelectionPolicy,
    pub seed: u64,
    pub model_name: String,
    pub detection: DecodingParams,
    pub generation: DecodingParams,
    pub retry: RetryPolicy,
    /// Upper bound on concurrent detection calls.
    pub concurrency: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            activity_policy: ActivityPolicy::default(),
            selection: SelectionPolicy::default(),
            seed: 0,
            model_name: "gpt-4".into(),
            detection: DecodingParams { temperature: 0.0, max_output_tokens: 256 },
            generation: DecodingParams { temperature: 0.7, max_output_tokens: 512 },
            retry: RetryPolicy::default(),
            concurrency: 4,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.retry.validate()?;
        if self.concurrency == 0 {
            return Err(PipelineError::InvalidConfig("concurrency must be at least 1".into()));
        }
        for (name, d) in [("detection", &self.detection), ("generation", &self.generation)] {
            if !(0.0..=2.0).contains(&d.temperature) {
                return Err(PipelineError::InvalidConfig(format!("{name}.temperature must be in [0, 2]")));
            }
        }
        if self.model_name.trim().is_empty() {
            return Err(PipelineError::InvalidConfig("model_name is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Detection,
    ChildActivity,
    ParentStarter,
    Summary,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid pipeline config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("{stage:?} stage{}: provider gave up after {attempts} attempts: {last_error}",
        skill.map(|s| format!(" for {s}")).unwrap_or_default())]
    ProviderExhausted { stage: Stage, skill: Option<SkillId>, attempts: u32, last_error: String },
    #[error("{stage:?} stage returned only whitespace")]
    EmptyGeneration { stage: Stage },
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub report: DetectionReport,
    pub selected_skill: Option<SkillId>,
    /// One per generated activity type, in [`ActivityType::ALL`] order.
    pub child_activities: Vec<ChildActivity>,
    pub parent_starter: Option<ParentStarter>,
    pub summary: EpisodeSummary,
    pub seed: u64,
    pub config_digest: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl PipelineOutput {
    pub fn activity(&self, activity_type: ActivityType) -> Option<&ChildActivity> {
        self.child_activities.iter().find(|a| a.activity_type == activity_type)
    }

    /// Activities and starter exist exactly when a skill was selected, and
    /// all refer to it.
    pub fn check_invariants(&self) -> Result<(), String> {
        self.report.validate().map_err(|e| e.to_string())?;
        match self.selected_skill {
            None if !self.child_activities.is_empty() || self.parent_starter.is_some() => {
                Err("activities present without a selected skill".into())
            }
            Some(_) if self.child_activities.is_empty() || self.parent_starter.is_none() => {
                Err("selected skill without activities or starter".into())
            }
            Some(skill)
                if self.child_activities.iter().any(|a| a.skill_id != skill)
                    || self.parent_starter.as_ref().is_some_and(|p| p.skill_id != skill) =>
            {
                Err("generated items refer to another skill".into())
            }
            _ => Ok(()),
        }
    }
}

enum AttemptError {
    Provider(ProviderError),
    Unparseable(String),
    Empty,
}

impl AttemptError {
    fn describe(&self) -> String {
        match self {
            AttemptError::Provider(e) => e.to_string(),
            AttemptError::Unparseable(e) => e.clone(),
            AttemptError::Empty => "empty response".into(),
        }
    }
}

/// Runs the pipeline stages against one provider.
pub struct Pipeline<'a> {
    pub taxonomy: &'a TaxonomyDataset,
    pub templates: &'a TemplateSet,
    pub provider: &'a dyn ChatProvider,
    pub config: &'a PipelineConfig,
}

impl<'a> Pipeline<'a> {
    pub fn new(
        taxonomy: &'a TaxonomyDataset,
        templates: &'a TemplateSet,
        provider: &'a dyn ChatProvider,
        config: &'a PipelineConfig,
    ) -> Result<Self, PipelineError> {
        config.validate()?;
        Ok(Pipeline { taxonomy, templates, provider, config })
    }

    /// Digest of everything besides the transcript and the provider that
    /// determines an output: config, taxonomy version, and template text.
    pub fn config_digest(&self) -> String {
        let config = serde_json::to_string(self.config).expect("config serializes");
        let mut parts = vec![config, self.taxonomy.version().to_string()];
        parts.extend(TemplateId::ALL.iter().map(|id| self.templates.get(*id).to_string()));
        easel_core::digest::sha256_parts(parts.iter().map(String::as_str))
    }

    fn call<T>(
        &self,
        prompt: &RenderedPrompt,
        decoding: &DecodingParams,
        mut accept: impl FnMut(&str) -> Result<T, AttemptError>,
    ) -> Result<T, (AttemptError, u32)> {
        let request = ProviderRequest::new(prompt.text.clone(), decoding.clone(), self.config.model_name.clone())
            .map_err(|e| (AttemptError::Provider(e), 0))?;
        let retry = &self.config.retry;
        let mut last = AttemptError::Empty;
        for attempt in 0..retry.max_attempts {
            if attempt > 0 {
                let wait = retry.delay(attempt - 1);
                if !wait.is_zero() {
                    std::thread::sleep(wait);
                }
            }
            let outcome = self.provider.complete(&request).map_err(AttemptError::Provider);
            match outcome.and_then(|r| accept(&r.text)) {
                Ok(value) => return Ok(value),
                Err(e) => {
                    tracing::debug!(attempt, error = %e.describe(), "provider attempt failed");
                    last = e;
                }
            }
        }
        Err((last, retry.max_attempts))
    }

    fn generation_error(stage: Stage, skill: Option<SkillId>, (err, attempts): (AttemptError, u32)) -> PipelineError {
        match err {
            AttemptError::Empty => PipelineError::EmptyGeneration { stage },
            other => PipelineError::ProviderExhausted { stage, skill, attempts, last_error: other.describe() },
        }
    }

    fn detect_one(&self, skill: SkillId, prompt: &RenderedPrompt) -> DetectionOutcome {
        let result = self.call(prompt, &self.config.detection, |text| {
            parse_detection_response(text, skill).map_err(|e| AttemptError::Unparseable(e.to_string()))
        });
        result.unwrap_or_else(|(err, attempts)| {
            DetectionOutcome::exhausted(
                skill,
                format!("provider exhausted after {attempts} attempts: {}", err.describe()),
            )
        })
    }

    /// Queries every skill independently. Calls run on up to
    /// `config.concurrency` threads; the report keeps taxonomy order. A skill
    /// whose calls all fail is recorded absent with a diagnostic.
    pub fn detect_skills(&self, transcript: &Transcript) -> Result<DetectionReport, PipelineError> {
        let prompts = self
            .taxonomy
            .skills()
            .iter()
            .map(|skill| render_detection_prompt(self.templates, skill, transcript).map(|p| (skill.id, p)))
            .collect::<Result<Vec<_>, _>>()?;
        let workers = self.config.concurrency.min(prompts.len()).max(1);
        let next = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel();
        std::thread::scope(|scope| {
            for _ in 0..workers {
                let tx = tx.clone();
                let (next, prompts) = (&next, &prompts);
                scope.spawn(move || loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some((skill, prompt)) = prompts.get(i) else { break };
                    let outcome = self.detect_one(*skill, prompt);
                    if tx.send((i, outcome)).is_err() {
                        break;
                    }
                });
            }
        });
        drop(tx);
        let mut slots: Vec<Option<DetectionOutcome>> = vec![None; prompts.len()];
        for (i, outcome) in rx {
            slots[i] = Some(outcome);
        }
        let outcomes = slots.into_iter().map(|o| o.expect("every worker reports")).collect();
        Ok(DetectionReport::new(transcript.episode_id.clone(), outcomes)?)
    }

    pub fn generate_child_activity(
        &self,
        transcript: &Transcript,
        skill: &SelSkill,
        explanation: &str,
        activity_type: ActivityType,
    ) -> Result<ChildActivity, PipelineError> {
        let prompt = render_child_activity_prompt(self.templates, activity_type, transcript, skill, explanation)?;
        let text = self
            .call(&prompt, &self.config.generation, |t| normalize_generation(t).ok_or(AttemptError::Empty))
            .map_err(|e| Self::generation_error(Stage::ChildActivity, Some(skill.id), e))?;
        Ok(ChildActivity {
            episode_id: transcript.episode_id.clone(),
            skill_id: skill.id,
            activity_type,
            prompt_text: text,
        })
    }

    pub fn generate_parent_starter(
        &self,
        transcript: &Transcript,
        skill: &SelSkill,
        explanation: &str,
    ) -> Result<ParentStarter, PipelineError> {
        let prompt = render_parent_prompt(self.templates, transcript, skill, explanation)?;
        let (prompt_text, examples_text) = self
            .call(&prompt, &self.config.generation, |t| {
                let text = normalize_generation(t).ok_or(AttemptError::Empty)?;
                let (prompt, examples) = split_examples(&text);
                if prompt.is_empty() {
                    return Err(AttemptError::Empty);
                }
                Ok((prompt, examples))
            })
            .map_err(|e| Self::generation_error(Stage::ParentStarter, Some(skill.id), e))?;
        Ok(ParentStarter {
            episode_id: transcript.episode_id.clone(),
            skill_id: skill.id,
            prompt_text,
            examples_text,
        })
    }

    pub fn summarize_episode(&self, transcript: &Transcript) -> Result<EpisodeSummary, PipelineError> {
        let prompt = render_summary_prompt(self.templates, transcript)?;
        let text = self
            .call(&prompt, &self.config.generation, |t| normalize_generation(t).ok_or(AttemptError::Empty))
            .map_err(|e| Self::generation_error(Stage::Summary, None, e))?;
        Ok(EpisodeSummary { episode_id: transcript.episode_id.clone(), summary_text: text })
    }

    fn generate_for(
        &self,
        transcript: &Transcript,
        skill: &SelSkill,
        explanation: &str,
    ) -> Result<(Vec<ChildActivity>, ParentStarter), PipelineError> {
        let activities = self
            .config
            .activity_policy
            .activity_types()
            .into_iter()
            .map(|t| self.generate_child_activity(transcript, skill, explanation, t))
            .collect::<Result<Vec<_>, _>>()?;
        let starter = self.generate_parent_starter(transcript, skill, explanation)?;
        Ok((activities, starter))
    }

    /// detect → select → generate → summarize.
    pub fn run(&self, transcript: &Transcript) -> Result<PipelineOutput, PipelineError> {
        let report = self.detect_skills(transcript)?;
        let mut diagnostics: Vec<String> = report
            .outcomes
            .iter()
            .filter_map(|o| o.diagnostic.as_ref().map(|d| format!("{}: {d}", o.skill_id)))
            .collect();
        let mut selected = select_skill(&report, self.config.selection, self.config.seed);
        let mut child_activities = Vec::new();
        let mut parent_starter = None;
        if let Some(id) = selected {
            let skill = self.taxonomy.lookup(id);
            let explanation = report.outcome(id).explanation.clone().unwrap_or_default();
            match self.generate_for(transcript, skill, &explanation) {
                Ok((activities, starter)) => {
                    child_activities = activities;
                    parent_starter = Some(starter);
                }
                Err(e @ (PipelineError::ProviderExhausted { .. } | PipelineError::EmptyGeneration { .. })) => {
                    diagnostics.push(format!("generation for {id} abandoned: {e}"));
                    selected = None;
                }
                Err(e) => return Err(e),
            }
        }
        let summary = self.summarize_episode(transcript)?;
        Ok(PipelineOutput {
            report,
            selected_skill: selected,
            child_activities,
            parent_starter,
            summary,
            seed: self.config.seed,
            config_digest: self.config_digest(),
            diagnostics,
        })
    }
}

/// Convenience wrapper around [`Pipeline::run`].
pub fn run_pipeline(
    transcript: &Transcript,
    taxonomy: &TaxonomyDataset,
    templates: &TemplateSet,
    config: &PipelineConfig,
    provider: &dyn ChatProvider,
) -> Result<PipelineOutput, PipelineError> {
    Pipeline::new(taxonomy, templates, provider, config)?.run(transcript)
}
