//! `easel.toml` configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use easel_core::prompting::TemplateId;
use easel_core::{TaxonomyDataset, TemplateSet};
use serde::{Deserialize, Serialize};

use crate::formats::taxonomy::{default_taxonomy, load_taxonomy_file};
use crate::pipeline::PipelineConfig;
use crate::provider::{ChatProvider, HttpProvider, HttpProviderConfig, LoggingProvider, MockProvider, MockScript};
use crate::store::ArtifactKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProviderConfig {
    Http {
        endpoint: String,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
    Mock {
        script: PathBuf,
    },
}

fn default_timeout() -> u64 {
    60
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig::Http {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            timeout_secs: default_timeout(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    /// Value the `X-Easel-Parent` header must carry. Parent routes are
    /// disabled when unset.
    pub parent_secret: Option<String>,
    /// Artifact kinds that need a recorded verbal explanation before the
    /// session completes.
    pub explanation_required: Vec<ArtifactKind>,
    /// Directory served under `/videos`. Relative to the content root.
    pub videos_dir: PathBuf,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            parent_secret: None,
            explanation_required: vec![ArtifactKind::Drawing, ArtifactKind::Text],
            videos_dir: PathBuf::from("videos"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DataConfig {
    /// Replacement taxonomy document; the bundled one is used otherwise.
    pub taxonomy: Option<PathBuf>,
    /// Directory of template files named like the bundled ones
    /// (`detection.txt`, ...). Missing files fall back to the bundled text.
    pub templates_dir: Option<PathBuf>,
    /// Append-only provider traffic log.
    pub provider_log: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EaselConfig {
    pub provider: ProviderConfig,
    pub pipeline: PipelineConfig,
    pub service: ServiceConfig,
    pub data: DataConfig,
}

impl EaselConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
        let mut config: EaselConfig =
            toml::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        config.resolve_relative(path.parent().unwrap_or(Path::new(".")));
        config.pipeline.validate()?;
        Ok(config)
    }

    /// Interprets relative file paths as relative to the config file.
    fn resolve_relative(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let ProviderConfig::Mock { script } = &mut self.provider {
            fix(script);
        }
        for p in [&mut self.data.taxonomy, &mut self.data.templates_dir, &mut self.data.provider_log]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
    }

    pub fn taxonomy(&self) -> anyhow::Result<TaxonomyDataset> {
        Ok(match &self.data.taxonomy {
            Some(path) => load_taxonomy_file(path)?,
            None => default_taxonomy(),
        })
    }

    pub fn templates(&self) -> anyhow::Result<TemplateSet> {
        let mut set = TemplateSet::builtin();
        if let Some(dir) = &self.data.templates_dir {
            for id in TemplateId::ALL {
                let path = dir.join(format!("{}.txt", id.file_stem()));
                if path.exists() {
                    set.set(id, std::fs::read_to_string(&path)?);
                }
            }
        }
        Ok(set)
    }

    pub fn provider(&self) -> anyhow::Result<Arc<dyn ChatProvider>> {
        let base: Arc<dyn ChatProvider> = match &self.provider {
            ProviderConfig::Http { endpoint, timeout_secs } => Arc::new(HttpProvider::from_env(&HttpProviderConfig {
                endpoint: endpoint.clone(),
                timeout_secs: *timeout_secs,
            })?),
            ProviderConfig::Mock { script } => Arc::new(MockProvider::new(MockScript::from_file(script)?)),
        };
        Ok(match &self.data.provider_log {
            Some(path) => Arc::new(LoggingProvider::new(base, path)?),
            None => base,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::ActivityPolicy;
    use easel_core::{ActivityType, SelectionPolicy};

    #[test]
    fn partial_file_keeps_defaults() {
        let c: EaselConfig = toml::from_str(
            r#"
            [provider]
            kind = "mock"
            script = "script.json"

            [pipeline]
            seed = 7
            selection = "first_in_order"
            activity_policy = { fixed = "drawing" }

            [pipeline.retry]
            max_attempts = 2
            "#,
        )
        .unwrap();
        assert_eq!(c.pipeline.seed, 7);
        assert_eq!(c.pipeline.selection, SelectionPolicy::FirstInOrder);
        assert_eq!(c.pipeline.activity_policy, ActivityPolicy::Fixed(ActivityType::Drawing));
        assert_eq!(c.pipeline.retry.max_attempts, 2);
        assert_eq!(c.pipeline.retry.backoff_factor, 2.0);
        assert_eq!(c.pipeline.detection.temperature, 0.0);
        assert_eq!(c.pipeline.generation.temperature, 0.7);
        assert_eq!(c.pipeline.concurrency, 4);
        assert_eq!(c.service.explanation_required, [ArtifactKind::Drawing, ArtifactKind::Text]);
    }

    #[test]
    fn empty_file_is_default() {
        assert_eq!(toml::from_str::<EaselConfig>("").unwrap(), EaselConfig::default());
    }
}
