//! TOML configuration. Credentials are referenced by environment-variable
//! name only; the key itself never appears in the file.

use anyhow::{Context, Result};
use autorobo_core::arm::DEFAULT_MARGIN;
use autorobo_core::eval::{shipped_fixture_dir, DEFAULT_MODELS, STUB_ENDPOINT};
use autorobo_core::rl::{DEFAULT_EPISODES, DEFAULT_SEED};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Looked up in the working directory when `--config` is not given.
pub const DEFAULT_CONFIG_FILE: &str = "autorobo.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Chat-completions endpoint; `stub://...` selects the offline stub.
    pub endpoint: String,
    /// Model ids used by `bench`; the first one is the `run` default.
    pub models: Vec<String>,
    /// Name of the environment variable holding the API key.
    pub credential_env: Option<String>,
    pub fixture_dir: PathBuf,
    pub output_dir: PathBuf,
    pub rl: RlDefaults,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RlDefaults {
    pub episodes: usize,
    pub seed: u64,
    pub margin: f64,
}

impl Default for RlDefaults {
    fn default() -> Self {
        Self { episodes: DEFAULT_EPISODES, seed: DEFAULT_SEED, margin: DEFAULT_MARGIN }
    }
}

impl Default for Config {
    fn default() -> Self {
        Self {
            endpoint: STUB_ENDPOINT.to_string(),
            models: DEFAULT_MODELS.iter().map(|m| m.to_string()).collect(),
            credential_env: None,
            fixture_dir: shipped_fixture_dir(),
            output_dir: PathBuf::from("runs"),
            rl: RlDefaults::default(),
        }
    }
}

impl Config {
    /// Reads `path`, or the default file if present, or built-in defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let path = match path {
            Some(p) => p.to_path_buf(),
            None if Path::new(DEFAULT_CONFIG_FILE).is_file() => PathBuf::from(DEFAULT_CONFIG_FILE),
            None => return Ok(Self::default()),
        };
        let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn default_model(&self) -> &str {
        self.models.first().map(String::as_str).unwrap_or(DEFAULT_MODELS[0])
    }
}
