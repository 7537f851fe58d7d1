use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use strichartz::Thresholds;

use crate::error::{LabError, Result};

fn default_workers() -> usize {
    1
}

/// A run request: one named experiment swept over the Cartesian product of
/// its parameter lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub seed: u64,
    pub output: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub params: BTreeMap<String, Vec<toml::Value>>,
    #[serde(default)]
    pub thresholds: Thresholds,
}

/// Fields that determine the numbers in the output; worker count and output
/// path are excluded so the hash is stable across machines.
#[derive(Serialize)]
struct Hashed<'a> {
    experiment: &'a str,
    seed: u64,
    params: &'a BTreeMap<String, Vec<toml::Value>>,
    thresholds: &'a Thresholds,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
        if cfg.output.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.output = dir.join(&cfg.output);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| LabError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical TOML of the hashed fields, hex encoded.
    pub fn hash(&self) -> String {
        let canon = toml::to_string(&Hashed {
            experiment: &self.experiment,
            seed: self.seed,
            params: &self.params,
            thresholds: &self.thresholds,
        })
        .expect("config serializes");
        Sha256::digest(canon.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}
