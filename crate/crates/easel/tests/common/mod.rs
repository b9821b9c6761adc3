#![allow(dead_code)]

use std::path::PathBuf;

use easel::core::{TaxonomyDataset, TemplateSet, Transcript};
use easel::formats::taxonomy::default_taxonomy;
use easel::pipeline::PipelineConfig;
use easel::provider::{MockProvider, MockScript};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn transcript() -> Transcript {
    serde_json::from_str(&read_fixture("frog_toad.json")).unwrap()
}

pub fn taxonomy() -> TaxonomyDataset {
    default_taxonomy()
}

pub fn templates() -> TemplateSet {
    TemplateSet::builtin()
}

pub fn config() -> PipelineConfig {
    serde_json::from_str(&read_fixture("pipeline_config.json")).unwrap()
}

pub fn script() -> MockScript {
    MockScript::from_file(&fixture("frog_toad_script.json")).unwrap()
}

pub fn provider() -> MockProvider {
    MockProvider::new(script())
}

/// Set EASEL_BLESS=1 to rewrite golden files from the current output.
pub fn blessing() -> bool {
    std::env::var_os("EASEL_BLESS").is_some()
}
pub mod http;
