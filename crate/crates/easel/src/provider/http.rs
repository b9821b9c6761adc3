use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{ChatProvider, ProviderError, ProviderRequest, ProviderResponse};

/// Environment variable holding the provider API key.
pub const API_KEY_ENV: &str = "EASEL_PROVIDER_KEY";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpProviderConfig {
    /// Full URL of an OpenAI-compatible `chat/completions` endpoint.
    pub endpoint: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
}

fn default_timeout() -> u64 {
    60
}

/// Client for OpenAI-compatible chat completion endpoints.
pub struct HttpProvider {
    client: reqwest::blocking::Client,
    endpoint: String,
    api_key: Option<String>,
}

impl HttpProvider {
    /// Builds a client, reading the key from [`API_KEY_ENV`]. A missing key
    /// is allowed for local endpoints that do not check one.
    pub fn from_env(config: &HttpProviderConfig) -> Result<Self, ProviderError> {
        Self::new(config, std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()))
    }

    pub fn new(config: &HttpProviderConfig, api_key: Option<String>) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| ProviderError::Config(e.to_string()))?;
        Ok(HttpProvider { client, endpoint: config.endpoint.clone(), api_key })
    }
}

impl ChatProvider for HttpProvider {
    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        let body = json!({
            "model": request.model_name,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.decoding.temperature,
            "max_tokens": request.decoding.max_output_tokens,
        });
        let started = Instant::now();
        let mut call = self.client.post(&self.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            call = call.bearer_auth(key);
        }
        let response = call.send().map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = response.status();
        let text = response.text().map_err(|e| ProviderError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(ProviderError::Status { status: status.as_u16(), body: text });
        }
        let payload: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| ProviderError::Payload(e.to_string()))?;
        let content = payload["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| ProviderError::Payload("missing choices[0].message.content".into()))?;
        Ok(ProviderResponse {
            text: content.to_string(),
            latency_ms: started.elapsed().as_secs_f64() * 1000.0,
            provider_meta: payload["id"].as_str().unwrap_or_default().to_string(),
        })
    }
}
