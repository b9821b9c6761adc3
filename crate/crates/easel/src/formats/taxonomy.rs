use std::io::{Read, Write};
use std::path::Path;

use easel_core::taxonomy::SkillEntry;
use easel_core::{TaxonomyDataset, TaxonomyError};
use serde::{Deserialize, Serialize};

const DEFAULT_TAXONOMY: &str = include_str!("../../assets/taxonomy.json");

#[derive(Debug, thiserror::Error)]
pub enum TaxonomyFileError {
    #[error("reading taxonomy: {0}")]
    Io(#[from] std::io::Error),
    #[error("taxonomy document is malformed: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] TaxonomyError),
}

#[derive(Serialize, Deserialize)]
struct Document {
    version: Option<String>,
    #[serde(default)]
    skills: Vec<SkillEntry>,
}

pub fn load_taxonomy<R: Read>(source: R) -> Result<TaxonomyDataset, TaxonomyFileError> {
    let doc: Document = serde_json::from_reader(source)?;
    let version = doc.version.unwrap_or_default();
    Ok(TaxonomyDataset::from_entries(&version, &doc.skills)?)
}

pub fn load_taxonomy_file(path: &Path) -> Result<TaxonomyDataset, TaxonomyFileError> {
    load_taxonomy(std::fs::File::open(path)?)
}

pub fn parse_taxonomy(text: &str) -> Result<TaxonomyDataset, TaxonomyFileError> {
    load_taxonomy(text.as_bytes())
}

pub fn write_taxonomy<W: Write>(dataset: &TaxonomyDataset, out: W) -> Result<(), TaxonomyFileError> {
    let doc = Document {
        version: Some(dataset.version().to_string()),
        skills: dataset.entries(),
    };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}

pub fn taxonomy_to_string(dataset: &TaxonomyDataset) -> String {
    let mut buf = Vec::new();
    write_taxonomy(dataset, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// The taxonomy shipped with the crate. Definitions are stand-ins written
/// from the skill descriptions, not an authoritative source.
pub fn default_taxonomy() -> TaxonomyDataset {
    parse_taxonomy(DEFAULT_TAXONOMY).expect("bundled taxonomy is valid")
}
