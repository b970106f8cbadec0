use std::path::{Path, PathBuf};

use graphwm_llm::{ChatBackend, ChatRequest, MockBackend, WireBackend, WireConfig};
use graphwm_pipeline::benchgen::GenConfig;
use graphwm_pipeline::execution::rule_agent_reply;
use graphwm_pipeline::sensory::echo_reply;
use graphwm_pipeline::Templates;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Wire,
    Mock,
    /// No LLM: fast-path ingest and keyword rules.
    #[default]
    None,
}

/// Settings shared by every subcommand. Loaded from `--config`, then
/// overridden field by field by whatever flags were given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub backend: Option<BackendKind>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub script: Option<PathBuf>,
    pub prompts: Option<PathBuf>,
    pub granularity: Option<usize>,
    pub max_retries: Option<usize>,
    pub concurrency: Option<usize>,
    pub seed: Option<u64>,
    /// Benchmark generation settings for `generate`.
    pub generation: Option<GenConfig>,
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }

    /// `other` wins wherever it has a value.
    pub fn overlay(self, other: CliConfig) -> CliConfig {
        CliConfig {
            backend: other.backend.or(self.backend),
            endpoint: other.endpoint.or(self.endpoint),
            model: other.model.or(self.model),
            api_key_env: other.api_key_env.or(self.api_key_env),
            script: other.script.or(self.script),
            prompts: other.prompts.or(self.prompts),
            granularity: other.granularity.or(self.granularity),
            max_retries: other.max_retries.or(self.max_retries),
            concurrency: other.concurrency.or(self.concurrency),
            seed: other.seed.or(self.seed),
            generation: other.generation.or(self.generation),
        }
    }

    pub fn backend_kind(&self) -> BackendKind {
        self.backend.unwrap_or_default()
    }

    pub fn templates(&self) -> Result<Templates, Failure> {
        match &self.prompts {
            Some(dir) => Templates::load_dir(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display()))),
            None => Ok(Templates::default()),
        }
    }

    pub fn backend(&self) -> Result<Option<Box<dyn ChatBackend>>, Failure> {
        self.backend_with(|req| {
            let p = req.last_user();
            echo_reply(p).or_else(|| rule_agent_reply(p))
        })
    }

    /// Like [`CliConfig::backend`], with `fallback` answering whatever the
    /// mock script does not cover.
    pub fn backend_with(
        &self,
        fallback: impl Fn(&ChatRequest) -> Option<String> + Send + Sync + 'static,
    ) -> Result<Option<Box<dyn ChatBackend>>, Failure> {
        match self.backend_kind() {
            BackendKind::None => Ok(None),
            BackendKind::Mock => {
                let base = match &self.script {
                    Some(path) => MockBackend::from_script_file(path).map_err(|e| Failure::Config(e.to_string()))?,
                    None => MockBackend::from_entries(Vec::new()),
                };
                Ok(Some(Box::new(base.with_responder(fallback))))
            }
            BackendKind::Wire => {
                let defaults = WireConfig::default();
                let endpoint = self
                    .endpoint
                    .clone()
                    .ok_or_else(|| Failure::Config("the wire backend needs --endpoint".into()))?;
                let api_key_env = self.api_key_env.clone().unwrap_or(defaults.api_key_env.clone());
                if std::env::var(&api_key_env).map_or(true, |v| v.is_empty()) {
                    return Err(Failure::Config(format!("the wire backend needs ${api_key_env} to be set")));
                }
                let cfg = WireConfig {
                    endpoint,
                    model: self.model.clone().unwrap_or(defaults.model.clone()),
                    api_key_env,
                    ..defaults
                };
                Ok(Some(Box::new(WireBackend::new(cfg).map_err(|e| Failure::Config(e.to_string()))?)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file = CliConfig {
            backend: Some(BackendKind::Mock),
            seed: Some(1),
            granularity: Some(25),
            ..CliConfig::default()
        };
        let flags = CliConfig {
            seed: Some(9),
            ..CliConfig::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.granularity, Some(25));
        assert_eq!(merged.backend_kind(), BackendKind::Mock);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"backend": "mock", "sead": 3}"#).unwrap();
        assert!(matches!(CliConfig::load(&p), Err(Failure::Config(_))));
        std::fs::write(&p, r#"{"backend": "none", "generation": {"seed": 4, "scales": [40]}}"#).unwrap();
        let c = CliConfig::load(&p).unwrap();
        assert_eq!(c.generation.unwrap().seed, 4);
    }

    #[test]
    fn wire_needs_endpoint_and_key() {
        let c = CliConfig {
            backend: Some(BackendKind::Wire),
            ..CliConfig::default()
        };
        assert!(matches!(c.backend(), Err(Failure::Config(_))));
        let c = CliConfig {
            endpoint: Some("http://127.0.0.1:9".into()),
            api_key_env: Some("GRAPHWM_TEST_SURELY_UNSET_KEY".into()),
            ..c
        };
        assert!(matches!(c.backend(), Err(Failure::Config(_))));
    }
}
