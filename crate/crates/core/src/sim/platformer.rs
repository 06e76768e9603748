//! Step-wise platformer dynamics shared by CoinRun and CoinRun-Platforms.
//!
//! Positions are tile units with `y` pointing up; the agent is an axis-aligned
//! square of half extent [`AGENT_HALF`] centred on `(x, y)`. One step runs, in
//! order: horizontal acceleration or friction, jump, gravity, x-then-y
//! collision resolution, monster motion, contacts, step counting.
//!
//! [`step`] is a pure function of `(level, state, action)`; [`PlatformerEnv`]
//! pairs a shared level with its current state.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levelgen::{MonsterSpec, PlatformerLevel, PlatformerVariant, TileKind};
use crate::sim::physics::*;
use crate::sim::Outcome;

/// Shrinks every overlap test so touching faces never count as contact.
const EPS: f64 = 1e-9;
/// Largest single vertical move before collision checks, in tiles.
const MAX_SUBSTEP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum PlatformerAction {
    Noop = 0,
    Left = 1,
    Right = 2,
    Jump = 3,
    LeftJump = 4,
    RightJump = 5,
    /// Drop through a crate top; no effect elsewhere.
    Down = 6,
}

impl PlatformerAction {
    pub const COUNT: usize = 7;
    pub const ALL: [PlatformerAction; 7] = [
        PlatformerAction::Noop,
        PlatformerAction::Left,
        PlatformerAction::Right,
        PlatformerAction::Jump,
        PlatformerAction::LeftJump,
        PlatformerAction::RightJump,
        PlatformerAction::Down,
    ];

    pub fn from_index(i: u32) -> Option<Self> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn index(self) -> u32 {
        self as u32
    }

    #[inline]
    pub fn horizontal(self) -> i32 {
        match self {
            PlatformerAction::Left | PlatformerAction::LeftJump => -1,
            PlatformerAction::Right | PlatformerAction::RightJump => 1,
            _ => 0,
        }
    }

    #[inline]
    pub fn jumps(self) -> bool {
        matches!(
            self,
            PlatformerAction::Jump | PlatformerAction::LeftJump | PlatformerAction::RightJump
        )
    }
}

/// Kinematic and episode state. Monster phases are a closed-form function of
/// `step_count`, see [`PlatformerState::monster_phase`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatformerState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub on_ground: bool,
    /// Bit `i` set while `level.coins[i]` is uncollected.
    pub coins_remaining: u32,
    pub step_count: u32,
    pub outcome: Outcome,
}

impl PlatformerState {
    pub fn done(&self) -> bool {
        self.outcome != Outcome::Running
    }

    pub fn coins_left(&self) -> u32 {
        self.coins_remaining.count_ones()
    }

    pub fn monster_phase(&self, monster: &MonsterSpec) -> f64 {
        monster.phase_at(self.step_count)
    }
}

pub fn reset(level: &PlatformerLevel) -> PlatformerState {
    let n = level.coins.len();
    assert!(n <= 32, "at most 32 coins per level");
    PlatformerState {
        x: f64::from(level.agent_spawn.x) + 0.5,
        y: f64::from(level.agent_spawn.y) + 0.5,
        vx: 0.0,
        vy: 0.0,
        on_ground: false,
        coins_remaining: if n == 32 { u32::MAX } else { (1u32 << n) - 1 },
        step_count: 0,
        outcome: Outcome::Running,
    }
}

/// Point along the patrol at `phase`: the start tile at phase 0, the end tile
/// at phase 0.5, back to the start at phase 1 (triangular wave).
pub fn monster_position(spec: &MonsterSpec, phase: f64) -> (f64, f64) {
    let p = phase - phase.floor();
    let t = if p < 0.5 { 2.0 * p } else { 2.0 - 2.0 * p };
    (
        f64::from(spec.patrol_start.x) + spec.patrol_length() * t,
        f64::from(spec.patrol_start.y),
    )
}

/// Centre of the monster's hitbox at `phase`.
pub fn monster_center(spec: &MonsterSpec, phase: f64) -> (f64, f64) {
    let (x, y) = monster_position(spec, phase);
    (x + 0.5, y + MONSTER_HALF)
}

#[inline]
fn tile_span(lo: f64, hi: f64) -> (i32, i32) {
    ((lo + EPS).floor() as i32, (hi - EPS).floor() as i32)
}

/// Whether the agent at its current position touches a saw, lava, a monster,
/// or has fallen below the level.
pub fn death_check(level: &PlatformerLevel, state: &PlatformerState) -> bool {
    if state.y < 0.0 {
        return true;
    }
    let (x0, x1) = tile_span(state.x - AGENT_HALF, state.x + AGENT_HALF);
    let (y0, y1) = tile_span(state.y - AGENT_HALF, state.y + AGENT_HALF);
    for ty in y0..=y1 {
        for tx in x0..=x1 {
            match level.grid.get(tx, ty) {
                TileKind::Lava => return true,
                TileKind::Saw => {
                    let (cx, cy) = (f64::from(tx) + 0.5, f64::from(ty) + 0.5);
                    let reach = AGENT_HALF + 0.5 - SAW_INSET;
                    if (state.x - cx).abs() < reach && (state.y - cy).abs() < reach {
                        return true;
                    }
                }
                _ => {}
            }
        }
    }
    let reach = AGENT_HALF + MONSTER_HALF;
    level.monsters.iter().any(|m| {
        let (mx, my) = monster_center(m, state.monster_phase(m));
        (state.x - mx).abs() < reach && (state.y - my).abs() < reach
    })
}

fn resolve_x(level: &PlatformerLevel, s: &mut PlatformerState) {
    if s.vx == 0.0 {
        return;
    }
    let nx = s.x + s.vx;
    // a falling body flush with a tile top hits that tile's corner instead of
    // sliding onto it
    let falling = !s.on_ground && s.vy < 0.0;
    let bottom = s.y - AGENT_HALF - if falling { 2.0 * EPS } else { 0.0 };
    let (y0, y1) = tile_span(bottom, s.y + AGENT_HALF);
    let col = if s.vx > 0.0 {
        (nx + AGENT_HALF - EPS).floor() as i32
    } else {
        (nx - AGENT_HALF + EPS).floor() as i32
    };
    let blocked = (y0..=y1).any(|ty| level.grid.get(col, ty).is_solid());
    if blocked {
        s.x = if s.vx > 0.0 {
            f64::from(col) - AGENT_HALF
        } else {
            f64::from(col + 1) + AGENT_HALF
        };
        s.vx = 0.0;
    } else {
        s.x = nx;
    }
}

fn resolve_y(level: &PlatformerLevel, s: &mut PlatformerState, dy: f64, drop_through: bool) {
    s.on_ground = false;
    let (x0, x1) = tile_span(s.x - AGENT_HALF, s.x + AGENT_HALF);
    let mut remaining = dy;
    while remaining != 0.0 {
        let part = remaining.clamp(-MAX_SUBSTEP, MAX_SUBSTEP);
        remaining -= part;
        let ny = s.y + part;
        if part < 0.0 {
            let old_bottom = s.y - AGENT_HALF;
            // touching a surface counts as landing on it
            let row = (ny - AGENT_HALF - EPS).floor() as i32;
            let top = f64::from(row + 1);
            let lands = (x0..=x1).any(|tx| match level.grid.get(tx, row) {
                k if k.is_solid() => true,
                TileKind::Crate => !drop_through && old_bottom >= top - 1e-6,
                _ => false,
            });
            if lands {
                s.y = top + AGENT_HALF;
                s.vy = 0.0;
                s.on_ground = true;
                return;
            }
        } else {
            let row = (ny + AGENT_HALF - EPS).floor() as i32;
            if (x0..=x1).any(|tx| level.grid.get(tx, row).is_solid()) {
                s.y = f64::from(row) - AGENT_HALF;
                s.vy = 0.0;
                return;
            }
        }
        s.y = ny;
    }
}

/// Advance one step. Returns the new state and the reward it produced.
pub fn step(
    level: &PlatformerLevel,
    state: &PlatformerState,
    action: PlatformerAction,
) -> Result<(PlatformerState, f32)> {
    if state.done() {
        return Err(Error::EpisodeFinished);
    }
    let mut s = *state;

    let dir = action.horizontal();
    if dir != 0 {
        s.vx += f64::from(dir) * RUN_ACCEL;
    } else if s.vx > 0.0 {
        s.vx = (s.vx - FRICTION).max(0.0);
    } else if s.vx < 0.0 {
        s.vx = (s.vx + FRICTION).min(0.0);
    }
    s.vx = s.vx.clamp(-MAX_VX, MAX_VX);
    // float residue from repeated 0.1 / 0.05 steps
    if s.vx.abs() < 1e-9 {
        s.vx = 0.0;
    }

    if action.jumps() && s.on_ground {
        s.vy = JUMP_VY;
    }
    let vy_before = s.vy;
    s.vy -= GRAVITY;

    resolve_x(level, &mut s);
    let mean_vy = 0.5 * (vy_before + s.vy);
    resolve_y(level, &mut s, mean_vy, action == PlatformerAction::Down);

    // monsters advance with the step counter
    s.step_count += 1;

    let mut reward = 0.0;
    if death_check(level, &s) {
        s.outcome = Outcome::Death;
    } else if s.coins_remaining != 0 {
        let (x0, x1) = (s.x - AGENT_HALF + EPS, s.x + AGENT_HALF - EPS);
        let (y0, y1) = (s.y - AGENT_HALF + EPS, s.y + AGENT_HALF - EPS);
        for (i, c) in level.coins.iter().enumerate() {
            let bit = 1u32 << i;
            if s.coins_remaining & bit == 0 {
                continue;
            }
            let (cx, cy) = (f64::from(c.x), f64::from(c.y));
            if x1 > cx && x0 < cx + 1.0 && y1 > cy && y0 < cy + 1.0 {
                s.coins_remaining &= !bit;
                match level.variant {
                    PlatformerVariant::CoinRun { .. } => {
                        reward += COIN_REWARD;
                        s.outcome = Outcome::CoinAll;
                    }
                    PlatformerVariant::Platforms => {
                        reward += PLATFORMS_COIN_REWARD;
                        if s.coins_remaining == 0 {
                            reward += PLATFORMS_CLEAR_BONUS;
                            s.outcome = Outcome::CoinAll;
                        }
                    }
                }
            }
        }
    }
    if s.outcome == Outcome::Running && s.step_count >= PLATFORMER_STEP_LIMIT {
        s.outcome = Outcome::Timeout;
    }
    Ok((s, reward))
}

/// A platformer level together with its live state.
#[derive(Debug, Clone)]
pub struct PlatformerEnv {
    level: Arc<PlatformerLevel>,
    state: PlatformerState,
}

impl PlatformerEnv {
    pub fn new(level: Arc<PlatformerLevel>) -> Self {
        let state = reset(&level);
        PlatformerEnv { level, state }
    }

    pub fn reset(&mut self) {
        self.state = reset(&self.level);
    }

    pub fn level(&self) -> &PlatformerLevel {
        &self.level
    }

    pub fn level_arc(&self) -> &Arc<PlatformerLevel> {
        &self.level
    }

    pub fn state(&self) -> &PlatformerState {
        &self.state
    }

    /// Overwrite the live state, e.g. to replay from a saved point.
    pub fn set_state(&mut self, state: PlatformerState) {
        self.state = state;
    }

    /// Returns `(reward, done)`.
    pub fn step(&mut self, action: PlatformerAction) -> Result<(f32, bool)> {
        let (next, reward) = step(&self.level, &self.state, action)?;
        self.state = next;
        Ok((reward, next.done()))
    }
}
