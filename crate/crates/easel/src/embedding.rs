use std::time::Duration;

use easel_core::eval::{EmbedError, Embedder};
use serde_json::json;

use crate::provider::API_KEY_ENV;

/// Client for OpenAI-compatible `embeddings` endpoints.
pub struct HttpEmbedder {
    client: reqwest::blocking::Client,
    endpoint: String,
    model: String,
    dimension: usize,
    api_key: Option<String>,
}

impl HttpEmbedder {
    pub fn new(endpoint: &str, model: &str, dimension: usize) -> Result<Self, EmbedError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| EmbedError::Provider(e.to_string()))?;
        Ok(HttpEmbedder {
            client,
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            dimension,
            api_key: std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()),
        })
    }
}

impl Embedder for HttpEmbedder {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, EmbedError> {
        let mut call = self.client.post(&self.endpoint).json(&json!({"model": self.model, "input": text}));
        if let Some(key) = &self.api_key {
            call = call.bearer_auth(key);
        }
        let response = call.send().map_err(|e| EmbedError::Provider(e.to_string()))?;
        let status = response.status();
        let payload: serde_json::Value = response.json().map_err(|e| EmbedError::Provider(e.to_string()))?;
        if !status.is_success() {
            return Err(EmbedError::Provider(format!("HTTP {status}: {payload}")));
        }
        let vector: Vec<f64> = payload["data"][0]["embedding"]
            .as_array()
            .ok_or_else(|| EmbedError::Provider("missing data[0].embedding".into()))?
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| EmbedError::Provider("non-numeric embedding".into())))
            .collect::<Result<_, _>>()?;
        if vector.len() != self.dimension {
            return Err(EmbedError::Provider(format!(
                "expected {} dimensions, got {}",
                self.dimension,
                vector.len()
            )));
        }
        Ok(vector)
    }
}
