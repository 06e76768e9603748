//! The agent interface and the validation agents.
//!
//! Ordinary agents see only observations. Privileged agents additionally
//! receive the live [`Env`] (level geometry and simulator state); the
//! benchmark refuses to put them in generalization reports.

mod maze_oracle;
mod runner;
mod search;

use std::error::Error as StdError;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::vecenv::Env;
use crate::Game;

pub use maze_oracle::MazeBfsOracle;
pub use runner::CoinRunScriptedRunner;
pub use search::{
    certify_platforms, physics_search_oracle, replay, PlatformsCertificate, SearchConfig, SearchOracleAgent,
    SearchOutcome, SearchStats,
};

pub type AgentError = Box<dyn StdError + Send + Sync>;
pub type AgentResult<T> = std::result::Result<T, AgentError>;

pub trait Agent: Send {
    fn name(&self) -> &str;

    /// Needs direct access to level internals.
    fn privileged(&self) -> bool {
        false
    }

    /// Reads observations; when false the harness may skip rendering.
    fn observes(&self) -> bool {
        true
    }

    /// Called at the start of every episode. `env` is `Some` only for
    /// privileged agents.
    fn reset(&mut self, env: Option<&Env>) -> AgentResult<()>;

    /// `obs` is a 64x64x3 frame, or empty if the agent does not observe.
    fn act(&mut self, obs: &[u8], env: Option<&Env>) -> AgentResult<u32>;
}

/// Uniform random actions from its own stream.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    actions: usize,
    rng: Rng,
}

impl RandomAgent {
    pub fn new(game: Game, rng: Rng) -> Self {
        RandomAgent {
            actions: game.action_count(),
            rng,
        }
    }
}

impl Agent for RandomAgent {
    fn name(&self) -> &str {
        "random"
    }

    fn observes(&self) -> bool {
        false
    }

    fn reset(&mut self, _env: Option<&Env>) -> AgentResult<()> {
        Ok(())
    }

    fn act(&mut self, _obs: &[u8], _env: Option<&Env>) -> AgentResult<u32> {
        Ok(self.rng.index(self.actions) as u32)
    }
}

/// Always action 0: NOOP in platformers, Up in mazes.
#[derive(Debug, Clone, Default)]
pub struct NoopAgent;

impl Agent for NoopAgent {
    fn name(&self) -> &str {
        "noop"
    }

    fn observes(&self) -> bool {
        false
    }

    fn reset(&mut self, _env: Option<&Env>) -> AgentResult<()> {
        Ok(())
    }

    fn act(&mut self, _obs: &[u8], _env: Option<&Env>) -> AgentResult<u32> {
        Ok(0)
    }
}

pub const AGENT_NAMES: [&str; 5] = ["random", "noop", "bfs-oracle", "scripted-runner", "search-oracle"];

/// Built-in agent by name. `seed` feeds the random agent.
pub fn agent_by_name(name: &str, game: Game, seed: u64) -> Result<Box<dyn Agent>> {
    let wrong_game = |want: &str| Error::Config(format!("agent {name} only plays {want}, not {game}"));
    Ok(match name {
        "random" => Box::new(RandomAgent::new(game, Rng::from_state(seed))),
        "noop" => Box::new(NoopAgent),
        "bfs-oracle" if game == Game::Mazes => Box::new(MazeBfsOracle::default()),
        "bfs-oracle" => return Err(wrong_game("mazes")),
        "scripted-runner" if game == Game::CoinRun => Box::new(CoinRunScriptedRunner),
        "scripted-runner" => return Err(wrong_game("coinrun")),
        "search-oracle" if game != Game::Mazes => Box::new(SearchOracleAgent::new(SearchConfig::default())),
        "search-oracle" => return Err(wrong_game("coinrun or platforms")),
        _ => {
            return Err(Error::Config(format!(
                "unknown agent {name:?}; expected one of {}",
                AGENT_NAMES.join(", ")
            )))
        }
    })
}

fn platformer(env: Option<&Env>) -> AgentResult<&crate::sim::PlatformerEnv> {
    match env {
        Some(Env::Platformer(e)) => Ok(e),
        Some(Env::Maze(_)) => Err("platformer agent given a maze".into()),
        None => Err("privileged agent called without level access".into()),
    }
}
