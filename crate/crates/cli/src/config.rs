use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

pub const CONFIG_VERSION: u32 = 1;

/// Values a JSON config file may supply. Any flag given on the command
/// line overrides the corresponding entry here.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub seed: Option<u64>,
    pub code: Option<String>,
    pub key_bits: Option<usize>,
    pub trials: Option<usize>,
    pub target: Option<f64>,
    pub dataset: Option<PathBuf>,
    pub record: Option<PathBuf>,
    pub helper: Option<PathBuf>,
    pub challenge: Option<PathBuf>,
    pub conditions: Option<Vec<String>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if cfg.version != CONFIG_VERSION {
            return Err(CliError::Usage(format!(
                "{}: unsupported config version {}",
                path.display(),
                cfg.version
            )));
        }
        Ok(cfg)
    }
}

/// Flag value, else config value, else a usage error naming the flag.
pub fn required<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(config).ok_or_else(|| CliError::Usage(format!("--{name} is required (flag or config file)")))
}
