//! Environment dynamics.

pub mod maze;
pub mod physics;
pub mod platformer;

use serde::{Deserialize, Serialize};

pub use maze::{MazeAction, MazeEnv, MazeState};
pub use platformer::{PlatformerAction, PlatformerEnv, PlatformerState};

/// How an episode ended, or `Running`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Running,
    /// Every coin collected (the single coin, in CoinRun).
    CoinAll,
    Death,
    Timeout,
    /// Maze goal reached.
    Goal,
}

impl Outcome {
    /// Ended with the positive terminal event of its game.
    pub fn is_success(self) -> bool {
        matches!(self, Outcome::CoinAll | Outcome::Goal)
    }
}
