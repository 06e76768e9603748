//! A hand-written CoinRun policy: run right, jump over whatever is close
//! ahead, and hold still while a monster walks toward the agent.

use crate::levelgen::{PlatformerLevel, TileKind};
use crate::sim::physics::{AGENT_HALF, MONSTER_HALF};
use crate::sim::platformer::{monster_center, step, PlatformerAction, PlatformerState};
use crate::sim::Outcome;
use crate::vecenv::Env;

use super::{platformer, Agent, AgentResult};

/// Trigger distances from the agent's front edge, in tiles.
const GAP_LOOKAHEAD: f64 = 0.6;
const LEDGE_LOOKAHEAD: f64 = 1.0;
const SAW_LOOKAHEAD: f64 = 1.3;
const MONSTER_JUMP_RANGE: f64 = 2.0;
const MONSTER_WAIT_RANGE: f64 = 6.0;

/// Steps a candidate action is rolled out before it is trusted.
const SAFETY_HORIZON: u32 = 24;

const FALLBACKS: [PlatformerAction; 4] = [
    PlatformerAction::Noop,
    PlatformerAction::Right,
    PlatformerAction::RightJump,
    PlatformerAction::Left,
];

#[derive(Debug, Clone, Default)]
pub struct CoinRunScriptedRunner;

impl CoinRunScriptedRunner {
    /// The reflex policy, vetoed by a short rollout when it would die.
    pub fn decide(level: &PlatformerLevel, s: &PlatformerState) -> PlatformerAction {
        let first = Self::reflex(level, s);
        std::iter::once(first)
            .chain(FALLBACKS.into_iter().filter(|&a| a != first))
            .find(|&a| survives(level, s, a))
            .unwrap_or(first)
    }

    pub fn reflex(level: &PlatformerLevel, s: &PlatformerState) -> PlatformerAction {
        if !s.on_ground {
            return PlatformerAction::Right;
        }
        let grid = &level.grid;
        let feet = (s.y - AGENT_HALF + 1e-6).floor() as i32;
        let front = s.x + AGENT_HALF;
        let col = |d: f64| (front + d).floor() as i32;

        // a drop to lower ground is walked off; only pits and hazards are jumped
        let pit = |c: i32| {
            let top = (0..feet).rev().find(|&y| grid.get(c, y) != TileKind::Empty && grid.get(c, y) != TileKind::Coin);
            top.is_none_or(|y| grid.get(c, y).is_hazard())
        };
        let gap = (0..=2).any(|k| pit(col(GAP_LOOKAHEAD * f64::from(k) / 2.0)));
        let ledge = (0..=2).any(|k| {
            let c = col(LEDGE_LOOKAHEAD * f64::from(k) / 2.0);
            grid.get(c, feet).is_solid() || grid.get(c, feet + 1).is_solid()
        });
        let saw = (0..=3).any(|k| {
            let c = col(SAW_LOOKAHEAD * f64::from(k) / 3.0);
            grid.get(c, feet) == TileKind::Saw
        });

        let mut monster_close = false;
        let mut monster_coming = false;
        for m in &level.monsters {
            let phase = s.monster_phase(m);
            let (mx, my) = monster_center(m, phase);
            if (my - MONSTER_HALF - f64::from(feet)).abs() > 0.5 {
                continue;
            }
            let ahead = mx - MONSTER_HALF - front;
            if ahead < -(2.0 * AGENT_HALF) {
                continue;
            }
            let moving_left = phase - phase.floor() >= 0.5;
            if ahead <= MONSTER_JUMP_RANGE {
                monster_close = true;
            } else if ahead <= MONSTER_WAIT_RANGE && moving_left {
                monster_coming = true;
            }
        }

        if gap || ledge || saw || monster_close {
            PlatformerAction::RightJump
        } else if monster_coming {
            PlatformerAction::Noop
        } else {
            PlatformerAction::Right
        }
    }
}

fn survives(level: &PlatformerLevel, s: &PlatformerState, first: PlatformerAction) -> bool {
    let mut cur = *s;
    let mut a = first;
    for _ in 0..SAFETY_HORIZON {
        cur = match step(level, &cur, a) {
            Ok((next, _)) => next,
            Err(_) => return false,
        };
        match cur.outcome {
            Outcome::Running => {}
            Outcome::Death => return false,
            _ => return true,
        }
        a = CoinRunScriptedRunner::reflex(level, &cur);
    }
    true
}

impl Agent for CoinRunScriptedRunner {
    fn name(&self) -> &str {
        "scripted-runner"
    }

    fn privileged(&self) -> bool {
        true
    }

    fn observes(&self) -> bool {
        false
    }

    fn reset(&mut self, env: Option<&Env>) -> AgentResult<()> {
        platformer(env).map(|_| ())
    }

    fn act(&mut self, _obs: &[u8], env: Option<&Env>) -> AgentResult<u32> {
        let e = platformer(env)?;
        Ok(Self::decide(e.level(), e.state()).index())
    }
}
