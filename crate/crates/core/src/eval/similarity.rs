use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::retelling::tokenize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimilarityError {
    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("vector has zero norm")]
    ZeroVector,
    #[error("no explanation pairs to compare")]
    EmptyInput,
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("cannot embed empty text")]
    EmptyText,
    #[error("embedding provider error: {0}")]
    Provider(String),
}

/// Cosine of the angle between two vectors, clamped to [-1, 1].
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, SimilarityError> {
    if u.len() != v.len() {
        return Err(SimilarityError::LengthMismatch(u.len(), v.len()));
    }
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(SimilarityError::ZeroVector);
    }
    Ok((dot / (libm::sqrt(uu) * libm::sqrt(vv))).clamp(-1.0, 1.0))
}

/// A sentence embedding backend.
pub trait Embedder {
    fn dimension(&self) -> usize;

    /// Embeds non-empty text. Callers should go through [`embed_text`],
    /// which rejects empty input before it reaches the backend.
    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError>;
}

impl<E: Embedder + ?Sized> Embedder for &E {
    fn dimension(&self) -> usize {
        (**self).dimension()
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        (**self).embed(text)
    }
}

pub fn embed_text<E: Embedder + ?Sized>(embedder: &E, text: &str) -> Result<Vec<f64>, EmbedError> {
    if text.trim().is_empty() {
        return Err(EmbedError::EmptyText);
    }
    embedder.embed(text)
}

/// Deterministic feature-hashing embedder for tests and offline runs.
///
/// Each token contributes a pseudo-random dense vector derived from its
/// SHA-256, so texts sharing words have correlated embeddings. A small
/// component hashed from the exact text keeps distinct strings apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashEmbedder {
    dimension: usize,
}

impl Default for HashEmbedder {
    fn default() -> Self {
        HashEmbedder { dimension: 16 }
    }
}

impl HashEmbedder {
    pub fn new(dimension: usize) -> Self {
        assert!(dimension > 0, "embedding dimension must be positive");
        HashEmbedder { dimension }
    }

    fn add_hashed(&self, out: &mut [f64], key: &[u8], weight: f64) {
        let mut block = 0u32;
        let mut filled = 0;
        while filled < out.len() {
            let digest = Sha256::new()
                .chain_update(block.to_le_bytes())
                .chain_update(key)
                .finalize();
            for pair in digest.chunks_exact(2) {
                if filled == out.len() {
                    break;
                }
                let raw = i16::from_le_bytes([pair[0], pair[1]]);
                out[filled] += weight * (raw as f64 / 32768.0);
                filled += 1;
            }
            block += 1;
        }
    }
}

impl Embedder for HashEmbedder {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let mut out = alloc::vec![0.0; self.dimension];
        for token in tokenize(text) {
            self.add_hashed(&mut out, token.as_bytes(), 1.0);
        }
        self.add_hashed(&mut out, text.as_bytes(), 0.25);
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub per_pair: Vec<f64>,
    pub mean: f64,
}

/// Mean cosine similarity between gold and predicted explanations. The
/// caller keeps only pairs where both sides gave an explanation.
pub fn explanation_similarity<E: Embedder + ?Sized>(
    pairs: &[(String, String)],
    embedder: &E,
) -> Result<SimilarityReport, SimilarityError> {
    if pairs.is_empty() {
        return Err(SimilarityError::EmptyInput);
    }
    let per_pair = pairs
        .iter()
        .map(|(gold, predicted)| {
            let g = embed_text(embedder, gold)?;
            let p = embed_text(embedder, predicted)?;
            cosine_similarity(&g, &p)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mean = per_pair.iter().sum::<f64>() / per_pair.len() as f64;
    Ok(SimilarityReport { per_pair, mean })
}
