//! The benchmark config file, TOML or JSON. Every field is optional; command
//! line flags take precedence over the file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::benchmark::TrainSize;
use crate::error::{Error, Result};
use crate::vecenv::LevelSet;
use crate::wrappers::{CutoutConfig, EpsilonGreedyConfig};
use crate::Game;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub game: Option<Game>,
    pub master_seed: Option<u32>,
    pub jobs: Option<usize>,
    pub agent: Option<String>,
    pub levels: Option<LevelSet>,
    pub episodes: Option<usize>,
    pub train_sizes: Option<Vec<TrainSize>>,
    pub test_size: Option<u32>,
    pub runs: Option<u32>,
    pub batch: Option<usize>,
    pub paint_velocity: Option<bool>,
    pub cutout: Option<CutoutConfig>,
    pub epsilon_greedy: Option<EpsilonGreedyConfig>,
}

impl FileConfig {
    /// Format is chosen by extension; anything other than `.json` is read
    /// as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let parsed = if is_json { Self::from_json(&text) } else { Self::from_toml(&text) };
        parsed.map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = &self.cutout {
            c.validate()?;
        }
        if let Some(e) = &self.epsilon_greedy {
            e.validate()?;
        }
        if self.jobs == Some(0) || self.batch == Some(0) || self.episodes == Some(0) || self.runs == Some(0) {
            return Err(Error::Config("jobs, batch, episodes and runs must be at least 1".into()));
        }
        Ok(())
    }
}
