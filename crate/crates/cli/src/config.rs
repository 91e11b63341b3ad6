//! Optional JSON config file, merged beneath command-line flags: a flag
//! that was given explicitly always wins, a missing flag falls back to the
//! config value, and a missing config value falls back to the documented
//! default. Unknown keys are rejected so typos fail loudly.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;

/// Every key any subcommand understands. One schema keeps config files
/// reusable across subcommands; each command reads only the keys it needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
    pub emotion: Option<String>,
    pub kind: Option<String>,
    pub chart: Option<String>,
    pub policy: Option<String>,
    pub model: Option<String>,
    pub k: Option<usize>,
    pub spec: Option<PathBuf>,
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub class_weights: Option<bool>,
    pub criterion: Option<String>,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: Option<usize>,
    pub trees: Option<usize>,
    pub features_per_split: Option<usize>,
    pub bootstrap: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flag value, else config value, else default.
pub fn pick<T: Clone>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Like [`pick`] but the setting is mandatory.
pub fn require<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T> {
    flag.or(config)
        .ok_or_else(|| anyhow!("missing required setting '{name}' (flag or config key)"))
}

/// Flag value, else parsed config string, else default.
pub fn pick_parsed<T>(flag: Option<T>, config: Option<&str>, default: T, key: &str) -> Result<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    match config {
        Some(s) => s
            .parse()
            .map_err(|e| anyhow!("config key '{key}': {e}")),
        None => Ok(default),
    }
}
