use std::collections::BTreeMap;
use std::path::Path;

use easel_core::retelling::{Lexicon, LexiconCategory, LexiconEntry, LexiconError, LexiconName};

const DEFAULT_LEXICON: &str = include_str!("../../assets/emotion_lexicon.txt");

#[derive(Debug, thiserror::Error)]
pub enum LexiconFileError {
    #[error("reading lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Entry { line: usize, source: LexiconError },
    #[error("line {0}: entry before any %category header")]
    NoCategory(usize),
    #[error("lexicon file has no `{0}` category")]
    MissingCategory(LexiconName),
}

/// Parses the lexicon format: `%category:<name>` header lines, each followed
/// by one entry per line. Blank lines and `#` comments are ignored, as are
/// categories other than affect and the two valence categories, so a larger
/// LIWC-derived file can be used as is.
pub fn parse_lexicon(text: &str) -> Result<Lexicon, LexiconFileError> {
    let mut categories: BTreeMap<LexiconName, Vec<LexiconEntry>> = BTreeMap::new();
    // None before the first header, Some(None) inside an ignored category.
    let mut current: Option<Option<LexiconName>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix("%category:") {
            let name = name.trim().parse::<LexiconName>().ok();
            if let Some(name) = name {
                categories.entry(name).or_default();
            }
            current = Some(name);
            continue;
        }
        match current {
            None => return Err(LexiconFileError::NoCategory(i + 1)),
            Some(None) => {}
            Some(Some(name)) => {
                let entry = line
                    .parse()
                    .map_err(|source| LexiconFileError::Entry { line: i + 1, source })?;
                categories.get_mut(&name).expect("created at header").push(entry);
            }
        }
    }
    let mut take = |name| -> Result<LexiconCategory, LexiconFileError> {
        let entries = categories.remove(&name).ok_or(LexiconFileError::MissingCategory(name))?;
        LexiconCategory::new(name, entries).map_err(|source| LexiconFileError::Entry { line: 0, source })
    };
    let affect = take(LexiconName::Affect)?;
    let positive = take(LexiconName::PositiveEmotion)?;
    let negative = take(LexiconName::NegativeEmotion)?;
    Ok(Lexicon::new(affect, positive, negative))
}

pub fn load_lexicon_file(path: &Path) -> Result<Lexicon, LexiconFileError> {
    parse_lexicon(&std::fs::read_to_string(path)?)
}

pub fn lexicon_to_string(lexicon: &Lexicon) -> String {
    let mut out = String::new();
    for name in LexiconName::ALL {
        out.push_str(&format!("%category:{name}\n"));
        for entry in &lexicon.category(name).entries {
            out.push_str(&format!("{entry}\n"));
        }
    }
    out
}

pub fn default_lexicon() -> Lexicon {
    parse_lexicon(DEFAULT_LEXICON).expect("bundled lexicon is valid")
}
