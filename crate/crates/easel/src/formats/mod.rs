//! File formats: taxonomy documents, lexicon files, and evaluation tables.

pub mod lexicon;
pub mod tables;
pub mod taxonomy;
