use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;

use parking_lot::Mutex;
use serde_json::json;

use super::{ChatProvider, ProviderError, ProviderRequest, ProviderResponse};

/// Wraps a provider and appends one JSON line per call to a log file.
pub struct LoggingProvider<P> {
    inner: P,
    log: Mutex<File>,
}

impl<P: ChatProvider> LoggingProvider<P> {
    pub fn new(inner: P, path: &Path) -> std::io::Result<Self> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let log = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(LoggingProvider { inner, log: Mutex::new(log) })
    }
}

impl<P: ChatProvider> ChatProvider for LoggingProvider<P> {
    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        let result = self.inner.complete(request);
        let line = json!({
            "at": chrono::Utc::now().to_rfc3339(),
            "prompt_digest": request.prompt_digest(),
            "model": request.model_name,
            "temperature": request.decoding.temperature,
            "max_output_tokens": request.decoding.max_output_tokens,
            "prompt": request.prompt,
            "response": result.as_ref().ok().map(|r| &r.text),
            "latency_ms": result.as_ref().ok().map(|r| r.latency_ms),
            "error": result.as_ref().err().map(|e| e.to_string()),
        });
        let mut log = self.log.lock();
        // Logging is best effort; a full disk must not fail the call.
        let _ = writeln!(log, "{line}").and_then(|_| log.flush());
        result
    }
}
