//! Run configuration, read from a TOML file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::alc::AlcOptions;
use crate::error::{EngineError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Largest rank swept for the classical families.
    pub max_rank: usize,
    /// Worker threads; 0 lets the pool decide.
    pub worker_count: usize,
    /// Half-width of the coefficient box for random elements of B.
    pub sample_box: i64,
    pub seed: u64,
    /// Cases with dim S^2 h above this are reported as skipped.
    pub max_sym2_dim: usize,
}

impl Default for Config {
    fn default() -> Self {
        let o = AlcOptions::default();
        Config { max_rank: 7, worker_count: 0, sample_box: o.sample_box, seed: o.seed, max_sym2_dim: 50_000 }
    }
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| EngineError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| EngineError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn alc_options(&self) -> AlcOptions {
        AlcOptions { sample_box: self.sample_box, seed: self.seed, ..AlcOptions::default() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let c = Config::from_toml_str("max_rank = 5\nseed = 7\n").unwrap();
        assert_eq!(c.max_rank, 5);
        assert_eq!(c.seed, 7);
        assert_eq!(c.sample_box, Config::default().sample_box);
        assert!(Config::from_toml_str("colour = 1").is_err());
    }
}
