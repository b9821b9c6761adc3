//! The ten-skill SEL taxonomy and the four reflection activity types.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of one of the ten SEL skills. Declaration order is the
/// canonical reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SkillId {
    A1,
    A2,
    M1,
    M2,
    S1,
    S2,
    S3,
    R1,
    R2,
    D1,
}

impl SkillId {
    pub const ALL: [SkillId; 10] = [
        SkillId::A1,
        SkillId::A2,
        SkillId::M1,
        SkillId::M2,
        SkillId::S1,
        SkillId::S2,
        SkillId::S3,
        SkillId::R1,
        SkillId::R2,
        SkillId::D1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SkillId::A1 => "A1",
            SkillId::A2 => "A2",
            SkillId::M1 => "M1",
            SkillId::M2 => "M2",
            SkillId::S1 => "S1",
            SkillId::S2 => "S2",
            SkillId::S3 => "S3",
            SkillId::R1 => "R1",
            SkillId::R2 => "R2",
            SkillId::D1 => "D1",
        }
    }

    /// The competency area implied by the id's letter prefix.
    pub fn category(self) -> SkillCategory {
        match self {
            SkillId::A1 | SkillId::A2 => SkillCategory::SelfAwareness,
            SkillId::M1 | SkillId::M2 => SkillCategory::SelfManagement,
            SkillId::S1 | SkillId::S2 | SkillId::S3 => SkillCategory::SocialAwareness,
            SkillId::R1 | SkillId::R2 => SkillCategory::RelationshipSkills,
            SkillId::D1 => SkillCategory::ResponsibleDecisionMaking,
        }
    }

    /// Position in canonical order.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SkillId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown skill id `{0}`")]
pub struct UnknownSkillId(pub String);

impl FromStr for SkillId {
    type Err = UnknownSkillId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        SkillId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(trimmed))
            .ok_or_else(|| UnknownSkillId(s.to_string()))
    }
}

/// The five CASEL competency areas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkillCategory {
    SelfAwareness,
    SelfManagement,
    SocialAwareness,
    RelationshipSkills,
    ResponsibleDecisionMaking,
}

impl SkillCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            SkillCategory::SelfAwareness => "self_awareness",
            SkillCategory::SelfManagement => "self_management",
            SkillCategory::SocialAwareness => "social_awareness",
            SkillCategory::RelationshipSkills => "relationship_skills",
            SkillCategory::ResponsibleDecisionMaking => "responsible_decision_making",
        }
    }
}

impl FromStr for SkillCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let all = [
            SkillCategory::SelfAwareness,
            SkillCategory::SelfManagement,
            SkillCategory::SocialAwareness,
            SkillCategory::RelationshipSkills,
            SkillCategory::ResponsibleDecisionMaking,
        ];
        all.into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| format!("unknown skill category `{s}`"))
    }
}

/// Reflection activity offered to the child after an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityType {
    /// Draw a personal experience.
    Drawing,
    /// Imagine a different outcome for the story.
    ChangeStory,
    /// Tell a personal story.
    PersonalStory,
    /// Act out or role play a scenario.
    RolePlay,
}

impl ActivityType {
    pub const ALL: [ActivityType; 4] = [
        ActivityType::Drawing,
        ActivityType::ChangeStory,
        ActivityType::PersonalStory,
        ActivityType::RolePlay,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActivityType::Drawing => "drawing",
            ActivityType::ChangeStory => "change_story",
            ActivityType::PersonalStory => "personal_story",
            ActivityType::RolePlay => "role_play",
        }
    }
}

impl fmt::Display for ActivityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActivityType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActivityType::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| format!("unknown activity type `{s}`"))
    }
}

/// A validated skill entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelSkill {
    pub id: SkillId,
    pub category: SkillCategory,
    pub description: String,
    pub definition: String,
    pub lack_description: String,
    pub positive_example: String,
    pub negative_example: String,
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    pub authored: bool,
}

/// Unvalidated skill entry as read from a taxonomy document. Every field is
/// optional so that validation can name exactly what is missing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillEntry {
    pub id: Option<String>,
    pub category: Option<String>,
    pub description: Option<String>,
    pub definition: Option<String>,
    pub lack_description: Option<String>,
    pub positive_example: Option<String>,
    pub negative_example: Option<String>,
    #[serde(default)]
    pub authored: Option<bool>,
}

impl From<&SelSkill> for SkillEntry {
    fn from(skill: &SelSkill) -> Self {
        SkillEntry {
            id: Some(skill.id.as_str().to_string()),
            category: Some(skill.category.as_str().to_string()),
            description: Some(skill.description.clone()),
            definition: Some(skill.definition.clone()),
            lack_description: Some(skill.lack_description.clone()),
            positive_example: Some(skill.positive_example.clone()),
            negative_example: Some(skill.negative_example.clone()),
            authored: skill.authored.then_some(true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("missing or empty field `{0}`")]
    MissingField(String),
    #[error("duplicate skill id `{0}`")]
    DuplicateId(String),
    #[error("skill `{id}` has category `{found}` but its prefix implies `{expected}`")]
    CategoryMismatch {
        id: String,
        found: String,
        expected: &'static str,
    },
    #[error("taxonomy must contain exactly 10 skills, found {0}")]
    WrongSkillCount(usize),
    #[error("entry #{index}: {source}")]
    UnknownSkill {
        index: usize,
        source: UnknownSkillId,
    },
}

/// The validated, immutable skill set. Skills are held in canonical
/// [`SkillId`] order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaxonomyDataset {
    version: String,
    skills: Vec<SelSkill>,
}

/// Default failure-mode text when a taxonomy entry leaves it out.
pub fn default_lack_description(description: &str) -> String {
    format!("failing to {}", description.to_lowercase())
}

fn required(
    field: &Option<String>,
    label: &str,
    name: &str,
) -> Result<String, TaxonomyError> {
    match field {
        Some(v) if !v.trim().is_empty() => Ok(v.clone()),
        _ => Err(TaxonomyError::MissingField(format!("{label}.{name}"))),
    }
}

impl TaxonomyDataset {
    /// Validates raw entries into a dataset.
    pub fn from_entries(version: &str, entries: &[SkillEntry]) -> Result<Self, TaxonomyError> {
        if version.trim().is_empty() {
            return Err(TaxonomyError::MissingField("version".to_string()));
        }
        if entries.len() != SkillId::ALL.len() {
            return Err(TaxonomyError::WrongSkillCount(entries.len()));
        }
        let mut slots: [Option<SelSkill>; 10] = Default::default();
        for (index, entry) in entries.iter().enumerate() {
            let raw_id = match &entry.id {
                Some(id) if !id.trim().is_empty() => id.clone(),
                _ => return Err(TaxonomyError::MissingField(format!("skills[{index}].id"))),
            };
            let id: SkillId = raw_id
                .parse()
                .map_err(|source| TaxonomyError::UnknownSkill { index, source })?;
            let label = id.as_str();
            let category_text = required(&entry.category, label, "category")?;
            let expected = id.category();
            if category_text.trim() != expected.as_str() {
                return Err(TaxonomyError::CategoryMismatch {
                    id: label.to_string(),
                    found: category_text,
                    expected: expected.as_str(),
                });
            }
            let description = required(&entry.description, label, "description")?;
            let lack_description = match &entry.lack_description {
                Some(v) if !v.trim().is_empty() => v.clone(),
                Some(_) => {
                    return Err(TaxonomyError::MissingField(format!("{label}.lack_description")))
                }
                None => default_lack_description(&description),
            };
            let skill = SelSkill {
                id,
                category: expected,
                definition: required(&entry.definition, label, "definition")?,
                positive_example: required(&entry.positive_example, label, "positive_example")?,
                negative_example: required(&entry.negative_example, label, "negative_example")?,
                description,
                lack_description,
                authored: entry.authored.unwrap_or(false),
            };
            let slot = &mut slots[id.index()];
            if slot.is_some() {
                return Err(TaxonomyError::DuplicateId(label.to_string()));
            }
            *slot = Some(skill);
        }
        // Count is 10 and ids are unique, so every slot is filled.
        let skills = slots.into_iter().flatten().collect();
        Ok(TaxonomyDataset {
            version: version.to_string(),
            skills,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Skills in canonical order.
    pub fn skills(&self) -> &[SelSkill] {
        &self.skills
    }

    pub fn lookup(&self, id: SkillId) -> &SelSkill {
        &self.skills[id.index()]
    }

    pub fn entries(&self) -> Vec<SkillEntry> {
        self.skills.iter().map(SkillEntry::from).collect()
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::entries;
    use super::*;

    #[test]
    fn prefix_determines_category() {
        assert_eq!(SkillId::S3.category(), SkillCategory::SocialAwareness);
        assert_eq!(SkillId::D1.category(), SkillCategory::ResponsibleDecisionMaking);
        for id in SkillId::ALL {
            let expected = match &id.as_str()[..1] {
                "A" => SkillCategory::SelfAwareness,
                "M" => SkillCategory::SelfManagement,
                "S" => SkillCategory::SocialAwareness,
                "R" => SkillCategory::RelationshipSkills,
                _ => SkillCategory::ResponsibleDecisionMaking,
            };
            assert_eq!(id.category(), expected);
        }
    }

    #[test]
    fn nine_skills_is_wrong_count() {
        let mut e = entries();
        e.pop();
        assert_eq!(
            TaxonomyDataset::from_entries("v", &e),
            Err(TaxonomyError::WrongSkillCount(9))
        );
    }

    #[test]
    fn empty_example_names_field() {
        let mut e = entries();
        e[8].positive_example = Some("  ".into());
        assert_eq!(
            TaxonomyDataset::from_entries("v", &e),
            Err(TaxonomyError::MissingField("R2.positive_example".into()))
        );
    }

    #[test]
    fn duplicate_and_mismatch() {
        let mut e = entries();
        e[1].id = Some("A1".into());
        assert_eq!(
            TaxonomyDataset::from_entries("v", &e),
            Err(TaxonomyError::DuplicateId("A1".into()))
        );
        let mut e = entries();
        e[3].category = Some("social_awareness".into());
        assert!(matches!(
            TaxonomyDataset::from_entries("v", &e),
            Err(TaxonomyError::CategoryMismatch { ref id, .. }) if id == "M2"
        ));
    }

    #[test]
    fn shuffled_entries_come_back_in_canonical_order() {
        let mut e = entries();
        e.reverse();
        let d = TaxonomyDataset::from_entries("v", &e).unwrap();
        let ids: Vec<_> = d.skills().iter().map(|s| s.id).collect();
        assert_eq!(ids, SkillId::ALL.to_vec());
    }

    #[test]
    fn lack_description_defaults_from_description() {
        let d = TaxonomyDataset::from_entries("v", &entries()).unwrap();
        assert_eq!(d.lookup(SkillId::A2).lack_description, "failing to skill a2 description");
    }

    #[test]
    fn entries_round_trip() {
        let d = TaxonomyDataset::from_entries("v", &entries()).unwrap();
        let again = TaxonomyDataset::from_entries(d.version(), &d.entries()).unwrap();
        assert_eq!(d, again);
    }
}
