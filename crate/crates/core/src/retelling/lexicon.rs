use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexiconName {
    Affect,
    PositiveEmotion,
    NegativeEmotion,
}

impl LexiconName {
    pub const ALL: [LexiconName; 3] = [
        LexiconName::Affect,
        LexiconName::PositiveEmotion,
        LexiconName::NegativeEmotion,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LexiconName::Affect => "affect",
            LexiconName::PositiveEmotion => "positive_emotion",
            LexiconName::NegativeEmotion => "negative_emotion",
        }
    }
}

impl fmt::Display for LexiconName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LexiconName {
    type Err = LexiconError;

    /// Accepts the LIWC short names (`posemo`, `negemo`) as aliases.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "affect" => Ok(LexiconName::Affect),
            "positive_emotion" | "posemo" => Ok(LexiconName::PositiveEmotion),
            "negative_emotion" | "negemo" => Ok(LexiconName::NegativeEmotion),
            other => Err(LexiconError::UnknownCategory(other.to_string())),
        }
    }
}

/// A literal word, or a stem that matches any token beginning with it
/// (written `stem*`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexiconEntry {
    Literal(String),
    Prefix(String),
}

impl LexiconEntry {
    pub fn matches(&self, token: &str) -> bool {
        match self {
            LexiconEntry::Literal(w) => token == w,
            LexiconEntry::Prefix(stem) => token.starts_with(stem.as_str()),
        }
    }
}

impl fmt::Display for LexiconEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconEntry::Literal(w) => f.write_str(w),
            LexiconEntry::Prefix(stem) => write!(f, "{stem}*"),
        }
    }
}

impl FromStr for LexiconEntry {
    type Err = LexiconError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LexiconError::InvalidEntry(s.to_string());
        if s.is_empty() || s.chars().any(char::is_whitespace) || s.to_lowercase() != s {
            return Err(bad());
        }
        match s.strip_suffix('*') {
            Some(stem) if !stem.is_empty() && !stem.contains('*') => {
                Ok(LexiconEntry::Prefix(stem.to_string()))
            }
            Some(_) => Err(bad()),
            None if s.contains('*') => Err(bad()),
            None => Ok(LexiconEntry::Literal(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("invalid lexicon entry `{0}` (must be lowercase, without spaces, `*` only at the end)")]
    InvalidEntry(String),
    #[error("unknown lexicon category `{0}`")]
    UnknownCategory(String),
    #[error("lexicon category `{0}` has no entries")]
    EmptyCategory(LexiconName),
    #[error("text has no tokens")]
    EmptyText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconCategory {
    pub name: LexiconName,
    pub entries: Vec<LexiconEntry>,
}

impl LexiconCategory {
    pub fn new(name: LexiconName, entries: Vec<LexiconEntry>) -> Result<Self, LexiconError> {
        if entries.is_empty() {
            return Err(LexiconError::EmptyCategory(name));
        }
        Ok(LexiconCategory { name, entries })
    }

    /// Parses entries written as in a lexicon file (`kind`, `hug*`).
    pub fn parse<'a, I>(name: LexiconName, entries: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let entries = entries
            .into_iter()
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, entries)
    }
}

/// The three emotion categories. The affect category always includes every
/// positive and negative entry in addition to its own general terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lexicon {
    affect: LexiconCategory,
    positive: LexiconCategory,
    negative: LexiconCategory,
}

impl Lexicon {
    pub fn new(
        affect: LexiconCategory,
        positive: LexiconCategory,
        negative: LexiconCategory,
    ) -> Self {
        let mut merged: BTreeSet<LexiconEntry> = affect.entries.into_iter().collect();
        merged.extend(positive.entries.iter().cloned());
        merged.extend(negative.entries.iter().cloned());
        Lexicon {
            affect: LexiconCategory {
                name: LexiconName::Affect,
                entries: merged.into_iter().collect(),
            },
            positive,
            negative,
        }
    }

    pub fn category(&self, name: LexiconName) -> &LexiconCategory {
        match name {
            LexiconName::Affect => &self.affect,
            LexiconName::PositiveEmotion => &self.positive,
            LexiconName::NegativeEmotion => &self.negative,
        }
    }
}

/// Unique tokens matching any entry of `category`.
pub fn match_lexicon(tokens: &[String], category: &LexiconCategory) -> BTreeSet<String> {
    tokens
        .iter()
        .filter(|t| category.entries.iter().any(|e| e.matches(t)))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryFeatures {
    pub matched: BTreeSet<String>,
    /// Unique matched words over unique words in the text.
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionFeatures {
    pub unique_tokens: usize,
    pub affect: CategoryFeatures,
    pub positive_emotion: CategoryFeatures,
    pub negative_emotion: CategoryFeatures,
}

impl EmotionFeatures {
    pub fn category(&self, name: LexiconName) -> &CategoryFeatures {
        match name {
            LexiconName::Affect => &self.affect,
            LexiconName::PositiveEmotion => &self.positive_emotion,
            LexiconName::NegativeEmotion => &self.negative_emotion,
        }
    }
}

/// Per-category proportions of unique emotion words among unique words.
pub fn extract_emotion_features(text: &str, lexicon: &Lexicon) -> Result<EmotionFeatures, LexiconError> {
    let tokens = tokenize(text);
    let unique: BTreeSet<String> = tokens.into_iter().collect();
    if unique.is_empty() {
        return Err(LexiconError::EmptyText);
    }
    let unique: Vec<String> = unique.into_iter().collect();
    let features = |name| {
        let matched = match_lexicon(&unique, lexicon.category(name));
        CategoryFeatures {
            proportion: matched.len() as f64 / unique.len() as f64,
            matched,
        }
    };
    Ok(EmotionFeatures {
        unique_tokens: unique.len(),
        affect: features(LexiconName::Affect),
        positive_emotion: features(LexiconName::PositiveEmotion),
        negative_emotion: features(LexiconName::NegativeEmotion),
    })
}
