//! Grid dynamics for mazes: one cell per step, walls block.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levelgen::{CellKind, MazeLevel, TilePos};
use crate::sim::Outcome;

pub const GOAL_REWARD: f32 = 10.0;
pub const MAZE_STEP_LIMIT: u32 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum MazeAction {
    Up = 0,
    Down = 1,
    Left = 2,
    Right = 3,
}

impl MazeAction {
    pub const COUNT: usize = 4;
    pub const ALL: [MazeAction; 4] = [MazeAction::Up, MazeAction::Down, MazeAction::Left, MazeAction::Right];

    pub fn from_index(i: u32) -> Option<Self> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn index(self) -> u32 {
        self as u32
    }

    /// Offset on a grid whose rows grow downward.
    pub fn delta(self) -> (i32, i32) {
        match self {
            MazeAction::Up => (0, -1),
            MazeAction::Down => (0, 1),
            MazeAction::Left => (-1, 0),
            MazeAction::Right => (1, 0),
        }
    }

    /// The move from `from` to an adjacent `to`.
    pub fn between(from: TilePos, to: TilePos) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.delta() == (to.x - from.x, to.y - from.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MazeState {
    pub agent: TilePos,
    pub step_count: u32,
    pub outcome: Outcome,
}

impl MazeState {
    pub fn done(&self) -> bool {
        self.outcome != Outcome::Running
    }
}

pub fn reset(level: &MazeLevel) -> MazeState {
    MazeState {
        agent: level.agent_start,
        step_count: 0,
        outcome: Outcome::Running,
    }
}

/// Move if the target cell is open, otherwise stay put.
pub fn step(level: &MazeLevel, state: &MazeState, action: MazeAction) -> Result<(MazeState, f32)> {
    if state.done() {
        return Err(Error::EpisodeFinished);
    }
    let mut s = *state;
    let (dx, dy) = action.delta();
    let target = TilePos::new(s.agent.x + dx, s.agent.y + dy);
    let kind = level.cell(target.x, target.y);
    if kind.is_corridor() {
        s.agent = target;
    }
    s.step_count += 1;
    let mut reward = 0.0;
    if kind == CellKind::Goal {
        s.outcome = Outcome::Goal;
        reward = GOAL_REWARD;
    } else if s.step_count >= MAZE_STEP_LIMIT {
        s.outcome = Outcome::Timeout;
    }
    Ok((s, reward))
}

#[derive(Debug, Clone)]
pub struct MazeEnv {
    level: Arc<MazeLevel>,
    state: MazeState,
}

impl MazeEnv {
    pub fn new(level: Arc<MazeLevel>) -> Self {
        let state = reset(&level);
        MazeEnv { level, state }
    }

    pub fn reset(&mut self) {
        self.state = reset(&self.level);
    }

    pub fn level(&self) -> &MazeLevel {
        &self.level
    }

    pub fn state(&self) -> &MazeState {
        &self.state
    }

    /// Returns `(reward, done)`.
    pub fn step(&mut self, action: MazeAction) -> Result<(f32, bool)> {
        let (next, reward) = step(&self.level, &self.state, action)?;
        self.state = next;
        Ok((reward, next.done()))
    }
}
