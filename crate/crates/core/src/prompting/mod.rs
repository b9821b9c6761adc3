//! Prompt templates, rendering, and model-response parsing.

mod parse;
mod render;
mod templates;

pub use parse::{parse_detection_response, ParseError};
pub use render::{
    render_child_activity_prompt, render_detection_prompt, render_parent_prompt,
    render_summary_prompt,
};
pub use templates::{TemplateId, TemplateSet};

use alloc::string::String;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A plain-text episode transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub episode_id: String,
    pub title: String,
    pub body: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_minutes: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptKind {
    Detection,
    ChildActivity,
    ParentStarter,
    Summary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedPrompt {
    pub kind: PromptKind,
    pub template_id: TemplateId,
    pub text: String,
    pub inputs_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("placeholder [{0}] left in rendered prompt")]
    PlaceholderLeak(String),
    #[error("transcript body is empty")]
    EmptyTranscript,
    #[error("skill explanation is empty")]
    EmptyExplanation,
}
