//! Deterministic procedural environments for measuring generalization in
//! reinforcement learning: CoinRun, CoinRun-Platforms and RandomMazes.
//!
//! Every level is a pure function of a 32-bit [`rng::LevelSeed`]. Simulation
//! and rendering are deterministic, so a seed plus an action stream fixes the
//! observation stream byte for byte.
//!
//! ```
//! use procbench::{Game, vecenv::{LevelSet, VecEnv, VecEnvConfig}};
//!
//! let mut env = VecEnv::new(VecEnvConfig::new(Game::CoinRun, 4, LevelSet::Unbounded, 1)).unwrap();
//! let result = env.step_batch(&[2, 2, 5, 0]).unwrap();
//! assert_eq!(result.observations.len(), 4 * 64 * 64 * 3);
//! ```

pub mod agents;
pub mod benchmark;
pub mod commands;
pub mod config;
pub mod error;
pub mod levelgen;
pub mod render;
pub mod rng;
pub mod sim;
pub mod union_find;
pub mod validate;
pub mod vecenv;
pub mod wrappers;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Game {
    CoinRun,
    Platforms,
    Mazes,
}

impl Game {
    pub const ALL: [Game; 3] = [Game::CoinRun, Game::Platforms, Game::Mazes];

    pub fn name(self) -> &'static str {
        match self {
            Game::CoinRun => "coinrun",
            Game::Platforms => "platforms",
            Game::Mazes => "mazes",
        }
    }

    pub fn action_count(self) -> usize {
        match self {
            Game::CoinRun | Game::Platforms => sim::PlatformerAction::COUNT,
            Game::Mazes => sim::MazeAction::COUNT,
        }
    }

    pub fn step_limit(self) -> u32 {
        match self {
            Game::CoinRun | Game::Platforms => sim::physics::PLATFORMER_STEP_LIMIT,
            Game::Mazes => sim::maze::MAZE_STEP_LIMIT,
        }
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Game {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Game::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown game {s:?}; expected coinrun, platforms or mazes")))
    }
}
