//! Chat-completion providers.

mod http;
mod logging;
mod mock;

pub use http::{HttpProvider, HttpProviderConfig, API_KEY_ENV};
pub use logging::LoggingProvider;
pub use mock::{CallRecord, MockProvider, MockScript, ScriptRule, ScriptedReply};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodingParams {
    pub temperature: f64,
    pub max_output_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderRequest {
    pub prompt: String,
    pub decoding: DecodingParams,
    pub model_name: String,
}

impl ProviderRequest {
    pub fn new(prompt: String, decoding: DecodingParams, model_name: String) -> Result<Self, ProviderError> {
        if prompt.trim().is_empty() {
            return Err(ProviderError::InvalidRequest("prompt text is empty".into()));
        }
        if !(0.0..=2.0).contains(&decoding.temperature) {
            return Err(ProviderError::InvalidRequest(format!(
                "temperature {} outside [0, 2]",
                decoding.temperature
            )));
        }
        Ok(ProviderRequest { prompt, decoding, model_name })
    }

    /// Hex SHA-256 of the prompt text; the key mock scripts use.
    pub fn prompt_digest(&self) -> String {
        easel_core::digest::sha256_hex(self.prompt.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderResponse {
    pub text: String,
    pub latency_ms: f64,
    /// Provider-specific detail such as the response id, kept opaque.
    pub provider_meta: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProviderError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider returned HTTP {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected provider payload: {0}")]
    Payload(String),
    #[error("scripted failure: {0}")]
    Scripted(String),
    #[error("provider not configured: {0}")]
    Config(String),
}

/// A blocking chat-completion backend. Implementations must be callable
/// from several threads at once.
pub trait ChatProvider: Send + Sync {
    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError>;
}

impl<P: ChatProvider + ?Sized> ChatProvider for &P {
    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        (**self).complete(request)
    }
}

impl<P: ChatProvider + ?Sized> ChatProvider for std::sync::Arc<P> {
    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        (**self).complete(request)
    }
}

impl<P: ChatProvider + ?Sized> ChatProvider for Box<P> {
    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        (**self).complete(request)
    }
}
