use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

use crate::taxonomy::ActivityType;

/// Identifies one template asset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    Detection,
    ChildDrawing,
    ChildImagine,
    ChildStory,
    ChildAct,
    ChildSuffix,
    Parent,
    Summary,
}

impl TemplateId {
    pub const ALL: [TemplateId; 8] = [
        TemplateId::Detection,
        TemplateId::ChildDrawing,
        TemplateId::ChildImagine,
        TemplateId::ChildStory,
        TemplateId::ChildAct,
        TemplateId::ChildSuffix,
        TemplateId::Parent,
        TemplateId::Summary,
    ];

    /// Asset file stem, e.g. `child_drawing` for `child_drawing.txt`.
    pub fn file_stem(self) -> &'static str {
        match self {
            TemplateId::Detection => "detection",
            TemplateId::ChildDrawing => "child_drawing",
            TemplateId::ChildImagine => "child_imagine",
            TemplateId::ChildStory => "child_story",
            TemplateId::ChildAct => "child_act",
            TemplateId::ChildSuffix => "child_suffix",
            TemplateId::Parent => "parent",
            TemplateId::Summary => "summary",
        }
    }

    /// Placeholder names this template may contain.
    pub fn placeholders(self) -> &'static [&'static str] {
        match self {
            TemplateId::Detection => &[
                "SKILL",
                "LACK_OF_SKILL",
                "SKILL_DEFINITION",
                "POSITIVE_EXAMPLE",
                "NEGATIVE_EXAMPLE",
                "TRANSCRIPT",
            ],
            TemplateId::ChildDrawing
            | TemplateId::ChildImagine
            | TemplateId::ChildStory
            | TemplateId::ChildAct
            | TemplateId::ChildSuffix
            | TemplateId::Parent => &["TRANSCRIPT", "SKILL_DESCRIPTION", "SKILL_EXPLANATION"],
            TemplateId::Summary => &["TRANSCRIPT"],
        }
    }

    pub fn for_activity(activity: ActivityType) -> TemplateId {
        match activity {
            ActivityType::Drawing => TemplateId::ChildDrawing,
            ActivityType::ChangeStory => TemplateId::ChildImagine,
            ActivityType::PersonalStory => TemplateId::ChildStory,
            ActivityType::RolePlay => TemplateId::ChildAct,
        }
    }
}

/// The full set of prompt template texts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    detection: String,
    child_drawing: String,
    child_imagine: String,
    child_story: String,
    child_act: String,
    child_suffix: String,
    parent: String,
    summary: String,
}

impl Default for TemplateSet {
    fn default() -> Self {
        Self::builtin()
    }
}

impl TemplateSet {
    /// Templates shipped in `templates/`.
    pub fn builtin() -> Self {
        TemplateSet {
            detection: include_str!("../../templates/detection.txt").to_string(),
            child_drawing: include_str!("../../templates/child_drawing.txt").to_string(),
            child_imagine: include_str!("../../templates/child_imagine.txt").to_string(),
            child_story: include_str!("../../templates/child_story.txt").to_string(),
            child_act: include_str!("../../templates/child_act.txt").to_string(),
            child_suffix: include_str!("../../templates/child_suffix.txt").to_string(),
            parent: include_str!("../../templates/parent.txt").to_string(),
            summary: include_str!("../../templates/summary.txt").to_string(),
        }
    }

    pub fn get(&self, id: TemplateId) -> &str {
        match id {
            TemplateId::Detection => &self.detection,
            TemplateId::ChildDrawing => &self.child_drawing,
            TemplateId::ChildImagine => &self.child_imagine,
            TemplateId::ChildStory => &self.child_story,
            TemplateId::ChildAct => &self.child_act,
            TemplateId::ChildSuffix => &self.child_suffix,
            TemplateId::Parent => &self.parent,
            TemplateId::Summary => &self.summary,
        }
    }

    /// Replaces one template, e.g. with an operator-edited asset.
    pub fn set(&mut self, id: TemplateId, text: String) {
        let slot = match id {
            TemplateId::Detection => &mut self.detection,
            TemplateId::ChildDrawing => &mut self.child_drawing,
            TemplateId::ChildImagine => &mut self.child_imagine,
            TemplateId::ChildStory => &mut self.child_story,
            TemplateId::ChildAct => &mut self.child_act,
            TemplateId::ChildSuffix => &mut self.child_suffix,
            TemplateId::Parent => &mut self.parent,
            TemplateId::Summary => &mut self.summary,
        };
        *slot = text;
    }
}
