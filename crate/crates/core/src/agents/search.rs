//! Breadth-first search over platformer states, used as a solvability
//! certificate.
//!
//! States are deduplicated on a quantized key: position to 1/4 tile,
//! velocity to 1/10 tile per step, ground contact, remaining coins, and the
//! phase (in sixteenths) of every monster within 8 tiles. Nodes keep the
//! exact continuous state, so a returned trace replays through
//! [`platformer::step`] to the same result. Quantization makes the search
//! incomplete but never unsound.
//!
//! CoinRun searches for the single coin. Platforms chains searches, each to
//! one of the nearest next coins, backtracking over a few alternatives per
//! stage; a failed chain is reported as inconclusive since some other visiting
//! order might have worked.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};

use crate::levelgen::{PlatformerLevel, PlatformerVariant, TileKind};
use crate::sim::physics::PLATFORMER_STEP_LIMIT;
use crate::sim::platformer::{self, monster_position, PlatformerAction, PlatformerState};
use crate::sim::Outcome;
use crate::vecenv::Env;

use super::{platformer as platformer_env, Agent, AgentResult};

const MONSTER_SIGHT: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Longest trace considered, in steps.
    pub horizon: u32,
    /// Most states stored before giving up as inconclusive.
    pub budget: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            horizon: PLATFORMER_STEP_LIMIT,
            budget: 3_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub states: usize,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    /// Replaying `trace` from reset collects every coin.
    Solved { trace: Vec<PlatformerAction>, stats: SearchStats },
    /// The quantized reachable set was exhausted, or the horizon reached,
    /// without success.
    Unsolvable { stats: SearchStats },
    /// The state budget ran out, or a Platforms chain got stuck.
    Inconclusive { stats: SearchStats },
}

impl SearchOutcome {
    pub fn is_solved(&self) -> bool {
        matches!(self, SearchOutcome::Solved { .. })
    }

    pub fn trace(&self) -> Option<&[PlatformerAction]> {
        match self {
            SearchOutcome::Solved { trace, .. } => Some(trace),
            _ => None,
        }
    }

    pub fn stats(&self) -> SearchStats {
        match self {
            SearchOutcome::Solved { stats, .. }
            | SearchOutcome::Unsolvable { stats }
            | SearchOutcome::Inconclusive { stats } => *stats,
        }
    }
}

/// splitmix64 finalizer over the written words; keys are already dense.
#[derive(Default)]
struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = self.0.rotate_left(8) ^ u64::from(b);
        }
    }

    fn write_u128(&mut self, v: u128) {
        self.0 ^= (v as u64) ^ ((v >> 64) as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
}

type KeySet = HashSet<u128, BuildHasherDefault<KeyHasher>>;

fn quantize(v: f64, scale: f64, offset: i64, bits: u32) -> u128 {
    let q = (v * scale).round() as i64 + offset;
    q.clamp(0, (1 << bits) - 1) as u128
}

fn state_key(level: &PlatformerLevel, s: &PlatformerState) -> u128 {
    let mut key = quantize(s.x, 4.0, 0, 16);
    key = key << 12 | quantize(s.y, 4.0, 0, 12);
    key = key << 5 | quantize(s.vx, 10.0, 16, 5);
    key = key << 7 | quantize(s.vy, 10.0, 100, 7);
    key = key << 1 | u128::from(s.on_ground);
    key = key << 32 | u128::from(s.coins_remaining);
    let mut monsters: u128 = 0;
    for m in &level.monsters {
        let phase = s.monster_phase(m);
        let (mx, _) = monster_position(m, phase);
        let bin = if (mx - s.x).abs() < MONSTER_SIGHT {
            (phase * 16.0) as u128 & 15
        } else {
            16
        };
        monsters = monsters.wrapping_mul(17).wrapping_add(bin);
    }
    key << 32 | (monsters & 0xFFFF_FFFF)
}

struct Node {
    state: PlatformerState,
    parent: u32,
    action: PlatformerAction,
}

/// Goal states found by one breadth-first pass, in the order reached.
struct Found {
    hits: Vec<(Vec<PlatformerAction>, PlatformerState)>,
    states: usize,
    depth: u32,
    over_budget: bool,
}

/// Layers searched past the first goal hit while collecting alternatives.
const EXTRA_LAYERS: u32 = 40;
/// A goal state counts only if some continuation stays alive this long.
const SURVIVAL_STEPS: u32 = 10;

fn survives(level: &PlatformerLevel, s: &PlatformerState, actions: &[PlatformerAction]) -> bool {
    if s.outcome != Outcome::Running {
        return s.outcome == Outcome::CoinAll;
    }
    let mut layer = vec![*s];
    let mut seen = KeySet::default();
    for _ in 0..SURVIVAL_STEPS {
        let mut next = Vec::new();
        for st in &layer {
            for &a in actions {
                let Ok((n, _)) = platformer::step(level, st, a) else { continue };
                match n.outcome {
                    Outcome::CoinAll | Outcome::Timeout => return true,
                    Outcome::Running if seen.insert(state_key(level, &n)) => next.push(n),
                    _ => {}
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        layer = next;
    }
    true
}

/// BFS from `start` for up to `want` distinct states satisfying `goal`.
fn search_from(
    level: &PlatformerLevel,
    start: PlatformerState,
    goal: impl Fn(&PlatformerState) -> bool,
    max_steps: u32,
    budget: usize,
    want: usize,
) -> Found {
    let actions: Vec<PlatformerAction> = if level.grid.count(TileKind::Crate) > 0 {
        PlatformerAction::ALL.to_vec()
    } else {
        // Down only differs from Noop on crates
        PlatformerAction::ALL[..6].to_vec()
    };
    let mut seen = KeySet::default();
    seen.insert(state_key(level, &start));
    let mut nodes = vec![Node {
        state: start,
        parent: u32::MAX,
        action: PlatformerAction::Noop,
    }];
    let mut found = Found {
        hits: Vec::new(),
        states: 0,
        depth: 0,
        over_budget: false,
    };
    let mut goal_seen = KeySet::default();
    let mut first_hit = None;
    let mut layer = 0..1;
    let mut depth = 0;
    'search: while !layer.is_empty() && depth < max_steps {
        if first_hit.is_some_and(|d| depth >= d + EXTRA_LAYERS) {
            break;
        }
        depth += 1;
        let next_start = nodes.len();
        for i in layer.clone() {
            let s = nodes[i].state;
            for &a in &actions {
                let Ok((n, _)) = platformer::step(level, &s, a) else { continue };
                if goal(&n) {
                    if !goal_seen.insert(state_key(level, &n)) || !survives(level, &n, &actions) {
                        continue;
                    }
                    let mut trace = vec![a];
                    let mut cur = i;
                    while nodes[cur].parent != u32::MAX {
                        trace.push(nodes[cur].action);
                        cur = nodes[cur].parent as usize;
                    }
                    trace.reverse();
                    found.hits.push((trace, n));
                    first_hit.get_or_insert(depth);
                    if found.hits.len() >= want {
                        break 'search;
                    }
                    continue;
                }
                if n.done() || !seen.insert(state_key(level, &n)) {
                    continue;
                }
                nodes.push(Node {
                    state: n,
                    parent: i as u32,
                    action: a,
                });
                if nodes.len() > budget {
                    found.over_budget = true;
                    break 'search;
                }
            }
        }
        layer = next_start..nodes.len();
    }
    found.states = nodes.len();
    found.depth = depth;
    found
}

/// Candidate coin pickups tried per stage of a Platforms chain.
const CHAIN_BRANCHING: usize = 4;

enum Chain {
    Done(Vec<PlatformerAction>),
    Failed,
    OverBudget,
}

/// Depth-first over stages: each stage collects the next coin, backtracking
/// to a later candidate when a pickup leaves the rest unreachable.
fn chain(level: &PlatformerLevel, state: PlatformerState, horizon: u32, budget: &mut usize, stats: &mut SearchStats) -> Chain {
    if state.coins_remaining == 0 {
        return Chain::Done(Vec::new());
    }
    let before = state.coins_left();
    let found = search_from(
        level,
        state,
        |s| s.coins_left() < before && s.outcome != Outcome::Death,
        horizon - state.step_count,
        *budget,
        CHAIN_BRANCHING,
    );
    stats.states += found.states;
    stats.depth = stats.depth.max(state.step_count + found.depth);
    *budget = budget.saturating_sub(found.states);
    if found.over_budget {
        return Chain::OverBudget;
    }
    for (part, next) in found.hits {
        match chain(level, next, horizon, budget, stats) {
            Chain::Done(rest) => {
                let mut trace = part;
                trace.extend(rest);
                return Chain::Done(trace);
            }
            Chain::Failed => continue,
            Chain::OverBudget => return Chain::OverBudget,
        }
    }
    Chain::Failed
}

/// Search for a trace that collects every coin within `config.horizon` steps.
pub fn physics_search_oracle(level: &PlatformerLevel, config: SearchConfig) -> SearchOutcome {
    let horizon = config.horizon.min(PLATFORMER_STEP_LIMIT);
    let start = platformer::reset(level);
    match level.variant {
        PlatformerVariant::CoinRun { .. } => {
            let found = search_from(level, start, |s| s.outcome == Outcome::CoinAll, horizon, config.budget, 1);
            let stats = SearchStats {
                states: found.states,
                depth: found.depth,
            };
            match found.hits.into_iter().next() {
                Some((trace, _)) => SearchOutcome::Solved { trace, stats },
                None if found.over_budget => SearchOutcome::Inconclusive { stats },
                None => SearchOutcome::Unsolvable { stats },
            }
        }
        PlatformerVariant::Platforms => {
            let mut budget = config.budget;
            let mut stats = SearchStats::default();
            match chain(level, start, horizon, &mut budget, &mut stats) {
                Chain::Done(trace) => SearchOutcome::Solved { trace, stats },
                _ => SearchOutcome::Inconclusive { stats },
            }
        }
    }
}

/// Run `trace` from reset. Returns the final state and the summed reward.
/// Stops early if the episode ends.
pub fn replay(level: &PlatformerLevel, trace: &[PlatformerAction]) -> (PlatformerState, f32) {
    let mut s = platformer::reset(level);
    let mut ret = 0.0;
    for &a in trace {
        if s.done() {
            break;
        }
        let (n, r) = platformer::step(level, &s, a).expect("running episode");
        s = n;
        ret += r;
    }
    (s, ret)
}

/// Result of certifying a Platforms level: the trace and its replayed return.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformsCertificate {
    pub trace: Vec<PlatformerAction>,
    pub certified_return: f32,
}

/// Full-clear certificate for a Platforms level, `None` if the search fails.
pub fn certify_platforms(level: &PlatformerLevel, config: SearchConfig) -> Option<PlatformsCertificate> {
    let trace = physics_search_oracle(level, config).trace()?.to_vec();
    let (_, certified_return) = replay(level, &trace);
    Some(PlatformsCertificate {
        trace,
        certified_return,
    })
}

/// Plays a searched trace. If the search fails the agent idles.
#[derive(Debug, Clone)]
pub struct SearchOracleAgent {
    config: SearchConfig,
    plan: Vec<PlatformerAction>,
    cursor: usize,
}

impl SearchOracleAgent {
    pub fn new(config: SearchConfig) -> Self {
        SearchOracleAgent {
            config,
            plan: Vec::new(),
            cursor: 0,
        }
    }
}

impl Agent for SearchOracleAgent {
    fn name(&self) -> &str {
        "search-oracle"
    }

    fn privileged(&self) -> bool {
        true
    }

    fn observes(&self) -> bool {
        false
    }

    fn reset(&mut self, env: Option<&Env>) -> AgentResult<()> {
        let e = platformer_env(env)?;
        self.plan = physics_search_oracle(e.level(), self.config)
            .trace()
            .map(<[_]>::to_vec)
            .unwrap_or_default();
        self.cursor = 0;
        Ok(())
    }

    fn act(&mut self, _obs: &[u8], _env: Option<&Env>) -> AgentResult<u32> {
        let a = self.plan.get(self.cursor).copied().unwrap_or(PlatformerAction::Noop);
        self.cursor += 1;
        Ok(a.index())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelgen::{generate_coinrun, generate_platforms, TileGrid, TilePos};
    use crate::rng::LevelSeed;

    fn corridor(width: i32, gap: std::ops::Range<i32>) -> PlatformerLevel {
        let mut grid = TileGrid::new(width, 12);
        for x in 0..width {
            if !gap.contains(&x) {
                for y in 0..2 {
                    grid.set(x, y, TileKind::Ground);
                }
            }
        }
        for y in 0..12 {
            grid.set(0, y, TileKind::Wall);
            grid.set(width - 1, y, TileKind::Wall);
        }
        grid.set(width - 2, 2, TileKind::Coin);
        PlatformerLevel {
            seed: LevelSeed(0),
            variant: PlatformerVariant::CoinRun { difficulty: 1 },
            grid,
            agent_spawn: TilePos::new(1, 2),
            coins: vec![TilePos::new(width - 2, 2)],
            monsters: Vec::new(),
            palette_hue: 0,
        }
    }

    #[test]
    fn flat_corridor_is_solved_and_replays() {
        let level = corridor(20, 0..0);
        let out = physics_search_oracle(&level, SearchConfig::default());
        let trace = out.trace().expect("solved");
        let (s, r) = replay(&level, trace);
        assert_eq!(s.outcome, Outcome::CoinAll);
        assert_eq!(r, 10.0);
    }

    #[test]
    fn four_tile_gap_is_crossable() {
        let level = corridor(24, 8..12);
        let out = physics_search_oracle(&level, SearchConfig::default());
        assert_eq!(replay(&level, out.trace().expect("solved")).1, 10.0);
    }

    #[test]
    fn six_tile_gap_is_unsolvable() {
        let level = corridor(24, 8..14);
        let out = physics_search_oracle(&level, SearchConfig::default());
        assert!(matches!(out, SearchOutcome::Unsolvable { .. }), "{:?}", out.stats());
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let level = corridor(40, 0..0);
        let out = physics_search_oracle(&level, SearchConfig { horizon: 1000, budget: 50 });
        assert!(matches!(out, SearchOutcome::Inconclusive { .. }));
    }

    #[test]
    fn short_horizon_is_not_solved() {
        let level = corridor(40, 0..0);
        let out = physics_search_oracle(&level, SearchConfig { horizon: 20, budget: 1_000_000 });
        assert!(matches!(out, SearchOutcome::Unsolvable { .. }));
    }

    #[test]
    fn generated_levels_are_certified() {
        for s in 0..5 {
            let level = generate_coinrun(LevelSeed(s));
            let out = physics_search_oracle(&level, SearchConfig::default());
            let trace = out.trace().unwrap_or_else(|| panic!("seed {s}: {out:?}"));
            assert_eq!(replay(&level, trace).1, 10.0);
        }
        let level = generate_platforms(LevelSeed(1));
        let cert = certify_platforms(&level, SearchConfig::default()).expect("certified");
        assert_eq!(cert.certified_return, level.max_return());
        assert!(cert.trace.len() <= 1000);
    }
}
