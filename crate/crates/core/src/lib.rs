//! Core algorithms for eaSEL: the SEL skill taxonomy, prompt rendering and
//! response parsing, skill selection, and the evaluation statistics used to
//! validate detection, generation quality, and children's retellings.
//!
//! The crate is `no_std` and only needs an allocator. File formats, model
//! providers, persistence and the HTTP service live in the `easel` crate.

#![no_std]

extern crate alloc;

pub mod detection;
pub mod digest;
pub mod eval;
pub mod generation;
pub mod prompting;
pub mod retelling;
pub mod taxonomy;

pub use detection::{select_skill, DetectionOutcome, DetectionReport, SelectionPolicy};
pub use generation::{ChildActivity, EpisodeSummary, ParentStarter};
pub use prompting::{
    parse_detection_response, PromptError, PromptKind, RenderedPrompt, TemplateSet, Transcript,
};
pub use taxonomy::{ActivityType, SelSkill, SkillCategory, SkillId, TaxonomyDataset, TaxonomyError};
