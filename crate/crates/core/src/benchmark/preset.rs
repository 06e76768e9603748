use serde::{Deserialize, Serialize};

use crate::Game;

/// PPO settings of the published CoinRun baselines, for external trainers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingPreset {
    pub gamma: f64,
    pub lambda: f64,
    pub timesteps_per_rollout: u32,
    pub epochs_per_rollout: u32,
    pub minibatches_per_epoch: u32,
    pub entropy_bonus: f64,
    pub learning_rate: f64,
    pub envs_per_worker: u32,
    pub workers: u32,
    pub use_memory: bool,
}

impl TrainingPreset {
    pub fn for_game(game: Game) -> Self {
        TrainingPreset {
            gamma: 0.999,
            lambda: 0.95,
            timesteps_per_rollout: 256,
            epochs_per_rollout: 3,
            minibatches_per_epoch: 8,
            entropy_bonus: 0.01,
            learning_rate: 5e-4,
            envs_per_worker: if game == Game::Platforms { 96 } else { 32 },
            workers: 8,
            use_memory: game != Game::CoinRun,
        }
    }
}
