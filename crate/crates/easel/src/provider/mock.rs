use std::collections::BTreeMap;
use std::path::Path;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use super::{ChatProvider, ProviderError, ProviderRequest, ProviderResponse};

/// One scripted reply: response text, or a failure the provider reports as
/// a transport-level error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScriptedReply {
    Text(String),
    Fail { fail: String },
}

/// Replies for every prompt containing all of the `contains` substrings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptRule {
    pub contains: Vec<String>,
    pub responses: Vec<ScriptedReply>,
}

/// Mock provider script.
///
/// Lookup order for a prompt: exact prompt digest in `responses`, then the
/// first matching rule, then `default`. Each key replays its list in order,
/// one entry per call, and repeats the last entry once exhausted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default)]
    pub default: Option<ScriptedReply>,
    #[serde(default)]
    pub responses: BTreeMap<String, Vec<ScriptedReply>>,
    #[serde(default)]
    pub rules: Vec<ScriptRule>,
}

impl MockScript {
    pub fn from_file(path: &Path) -> Result<Self, ProviderError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ProviderError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ProviderError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub prompt_digest: String,
    /// `digest:<hex>`, `rule:<index>` or `default`.
    pub matched: String,
    pub reply: Option<ScriptedReply>,
    pub temperature: f64,
}

/// Deterministic provider driven by a [`MockScript`].
pub struct MockProvider {
    script: MockScript,
    cursors: Mutex<BTreeMap<String, usize>>,
    calls: Mutex<Vec<CallRecord>>,
}

impl MockProvider {
    pub fn new(script: MockScript) -> Self {
        MockProvider { script, cursors: Mutex::new(BTreeMap::new()), calls: Mutex::new(Vec::new()) }
    }

    pub fn calls(&self) -> Vec<CallRecord> {
        self.calls.lock().clone()
    }

    /// Number of calls made with the prompt whose digest is `digest`.
    pub fn call_count_for_digest(&self, digest: &str) -> usize {
        self.calls.lock().iter().filter(|c| c.prompt_digest == digest).count()
    }

    fn next_reply(&self, key: String, list: &[ScriptedReply]) -> Option<ScriptedReply> {
        let mut cursors = self.cursors.lock();
        let cursor = cursors.entry(key).or_insert(0);
        let reply = list.get(*cursor).or_else(|| list.last()).cloned();
        *cursor += 1;
        reply
    }
}

impl ChatProvider for MockProvider {
    fn complete(&self, request: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        let digest = request.prompt_digest();
        let (matched, reply) = if let Some(list) = self.script.responses.get(&digest) {
            let key = format!("digest:{digest}");
            (key.clone(), self.next_reply(key, list))
        } else if let Some((i, rule)) = self
            .script
            .rules
            .iter()
            .enumerate()
            .find(|(_, r)| r.contains.iter().all(|c| request.prompt.contains(c.as_str())))
        {
            let key = format!("rule:{i}");
            (key.clone(), self.next_reply(key, &rule.responses))
        } else {
            ("default".to_string(), self.script.default.clone())
        };
        self.calls.lock().push(CallRecord {
            prompt_digest: digest.clone(),
            matched: matched.clone(),
            reply: reply.clone(),
            temperature: request.decoding.temperature,
        });
        match reply {
            Some(ScriptedReply::Text(text)) => Ok(ProviderResponse { text, latency_ms: 0.0, provider_meta: matched }),
            Some(ScriptedReply::Fail { fail }) => Err(ProviderError::Scripted(fail)),
            None => Err(ProviderError::Scripted(format!("no scripted reply for prompt {digest}"))),
        }
    }
}
