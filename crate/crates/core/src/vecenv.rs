//! Batched environments with auto-reset and a flat observation buffer.
//!
//! Observations for a batch of `B` environments live in one contiguous
//! `B x 64 x 64 x 3` byte buffer, row-major, RGB. When `dones[i]` is set,
//! slot `i` of the buffer already holds the first frame of the next episode
//! and `infos[i]` describes the episode that just ended.
//!
//! Env `i` samples levels from `derive(master_seed ^ i, 3)` and draws wrapper
//! randomness from `derive(master_seed ^ i, 4)`, so its level sequence does not
//! depend on the batch size.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levelgen::Level;
use crate::render::{render_maze_into, render_platformer_into, OBS_BYTES};
use crate::rng::{LevelSeed, Rng, StreamTag};
use crate::sim::{MazeAction, MazeEnv, Outcome, PlatformerAction, PlatformerEnv};
use crate::wrappers::{apply_cutout, apply_epsilon_greedy, CutoutConfig, EpsilonGreedyConfig};
use crate::Game;

/// The levels an environment may draw from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum LevelSet {
    Explicit(Arc<[LevelSeed]>),
    /// Every 32-bit seed, drawn uniformly.
    Unbounded,
}

impl LevelSet {
    /// Rejects empty and duplicate-containing lists.
    pub fn explicit(seeds: impl IntoIterator<Item = LevelSeed>) -> Result<Self> {
        let seeds: Vec<LevelSeed> = seeds.into_iter().collect();
        if seeds.is_empty() {
            return Err(Error::Config("explicit level set is empty".into()));
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("level set lists seed {} twice", w[0])));
        }
        Ok(LevelSet::Explicit(seeds.into()))
    }

    pub fn range(start: u32, end: u32) -> Result<Self> {
        Self::explicit((start..end).map(LevelSeed))
    }

    /// Number of seeds, `None` for the unbounded set.
    pub fn len(&self) -> Option<usize> {
        match self {
            LevelSet::Explicit(s) => Some(s.len()),
            LevelSet::Unbounded => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn contains(&self, seed: LevelSeed) -> bool {
        match self {
            LevelSet::Explicit(s) => s.contains(&seed),
            LevelSet::Unbounded => true,
        }
    }

    pub fn seeds(&self) -> Option<&[LevelSeed]> {
        match self {
            LevelSet::Explicit(s) => Some(s),
            LevelSet::Unbounded => None,
        }
    }
}

/// Uniform over the explicit list, or over all 32-bit seeds.
pub fn sample_level(set: &LevelSet, rng: &mut Rng) -> Result<LevelSeed> {
    match set {
        LevelSet::Explicit(s) if s.is_empty() => Err(Error::Config("explicit level set is empty".into())),
        LevelSet::Explicit(s) => Ok(s[rng.index(s.len())]),
        LevelSet::Unbounded => Ok(LevelSeed(rng.next_u32())),
    }
}

/// Textual form: `unbounded`, `range:START..END` or `seeds:1,2,3`.
impl FromStr for LevelSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad level set {s:?}; expected unbounded, range:A..B or seeds:a,b,c"));
        if s == "unbounded" {
            return Ok(LevelSet::Unbounded);
        }
        if let Some(r) = s.strip_prefix("range:") {
            let (a, b) = r.split_once("..").ok_or_else(bad)?;
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().parse().map_err(|_| bad())?;
            return LevelSet::range(a, b);
        }
        if let Some(list) = s.strip_prefix("seeds:") {
            let seeds = list
                .split(',')
                .map(|t| t.trim().parse::<u32>().map(LevelSeed).map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            return LevelSet::explicit(seeds);
        }
        Err(bad())
    }
}

impl fmt::Display for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelSet::Unbounded => f.write_str("unbounded"),
            LevelSet::Explicit(s) => {
                let contiguous = s.windows(2).all(|w| w[1].0 == w[0].0.wrapping_add(1));
                if contiguous && s.len() > 1 && s[0].0.checked_add(s.len() as u32).is_some() {
                    write!(f, "range:{}..{}", s[0].0, s[0].0 + s.len() as u32)
                } else {
                    f.write_str("seeds:")?;
                    for (i, seed) in s.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{seed}")?;
                    }
                    Ok(())
                }
            }
        }
    }
}

impl TryFrom<String> for LevelSet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<LevelSet> for String {
    fn from(set: LevelSet) -> String {
        set.to_string()
    }
}

/// One environment on one level, for any game.
#[derive(Debug, Clone)]
pub enum Env {
    Platformer(PlatformerEnv),
    Maze(MazeEnv),
}

impl Env {
    pub fn new(game: Game, seed: LevelSeed) -> Self {
        Self::from_level(Level::generate(game, seed))
    }

    pub fn from_level(level: Level) -> Self {
        match level {
            Level::Platformer(l) => Env::Platformer(PlatformerEnv::new(Arc::new(l))),
            Level::Maze(m) => Env::Maze(MazeEnv::new(Arc::new(m))),
        }
    }

    pub fn game(&self) -> Game {
        match self {
            Env::Platformer(e) => e.level().game(),
            Env::Maze(_) => Game::Mazes,
        }
    }

    pub fn level_seed(&self) -> LevelSeed {
        match self {
            Env::Platformer(e) => e.level().seed,
            Env::Maze(e) => e.level().seed,
        }
    }

    pub fn reset(&mut self) {
        match self {
            Env::Platformer(e) => e.reset(),
            Env::Maze(e) => e.reset(),
        }
    }

    /// Returns `(reward, done)`.
    pub fn step(&mut self, action: u32) -> Result<(f32, bool)> {
        let invalid = |n| Error::InvalidAction { env: 0, action, n };
        match self {
            Env::Platformer(e) => {
                let a = PlatformerAction::from_index(action).ok_or_else(|| invalid(PlatformerAction::COUNT))?;
                e.step(a)
            }
            Env::Maze(e) => {
                let a = MazeAction::from_index(action).ok_or_else(|| invalid(MazeAction::COUNT))?;
                e.step(a)
            }
        }
    }

    pub fn outcome(&self) -> Outcome {
        match self {
            Env::Platformer(e) => e.state().outcome,
            Env::Maze(e) => e.state().outcome,
        }
    }

    pub fn step_count(&self) -> u32 {
        match self {
            Env::Platformer(e) => e.state().step_count,
            Env::Maze(e) => e.state().step_count,
        }
    }

    pub fn render_into(&self, paint_velocity: bool, out: &mut [u8]) {
        match self {
            Env::Platformer(e) => render_platformer_into(e.level(), e.state(), paint_velocity, out),
            Env::Maze(e) => render_maze_into(e.level(), e.state(), out),
        }
    }

    pub fn render(&self, paint_velocity: bool) -> crate::render::Observation {
        let mut obs = crate::render::Observation::default();
        self.render_into(paint_velocity, obs.as_mut_bytes());
        obs
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VecEnvConfig {
    pub game: Game,
    pub batch: usize,
    pub level_set: LevelSet,
    pub master_seed: u32,
    /// Paint agent velocity into platformer frames.
    pub paint_velocity: bool,
    /// When false, observation slots are left zeroed (throughput runs).
    pub render: bool,
    pub cutout: Option<CutoutConfig>,
    pub epsilon_greedy: Option<EpsilonGreedyConfig>,
    /// Worker threads for `step_batch`; 1 steps inline.
    pub jobs: usize,
}

impl VecEnvConfig {
    pub fn new(game: Game, batch: usize, level_set: LevelSet, master_seed: u32) -> Self {
        VecEnvConfig {
            game,
            batch,
            level_set,
            master_seed,
            paint_velocity: true,
            render: true,
            cutout: None,
            epsilon_greedy: None,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if self.level_set.is_empty() {
            return Err(Error::Config("explicit level set is empty".into()));
        }
        if let Some(c) = &self.cutout {
            c.validate()?;
        }
        if let Some(e) = &self.epsilon_greedy {
            e.validate()?;
        }
        Ok(())
    }
}

/// Per-env summary. While an episode runs it describes the running episode;
/// on a done step it describes the episode that just finished.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeInfo {
    pub level_seed: LevelSeed,
    pub episode_steps: u32,
    pub episode_return: f64,
    pub outcome: Outcome,
    /// The epsilon-greedy wrapper replaced this step's action.
    pub action_overridden: bool,
}

#[derive(Debug, Clone)]
pub struct StepResult {
    /// `B x 64 x 64 x 3`.
    pub observations: Vec<u8>,
    pub rewards: Vec<f32>,
    pub dones: Vec<bool>,
    pub infos: Vec<EpisodeInfo>,
}

impl StepResult {
    pub fn observation(&self, i: usize) -> &[u8] {
        &self.observations[i * OBS_BYTES..(i + 1) * OBS_BYTES]
    }
}

#[derive(Debug, Clone)]
struct Slot {
    env: Env,
    episode_rng: Rng,
    wrapper_rng: Rng,
    episode_return: f64,
}

struct SlotOutput {
    reward: f32,
    done: bool,
    info: EpisodeInfo,
}

#[derive(Clone, Copy)]
struct Shared<'a> {
    game: Game,
    level_set: &'a LevelSet,
    render: bool,
    paint_velocity: bool,
    cutout: Option<&'a CutoutConfig>,
    epsilon: Option<f64>,
}

impl<'a> Shared<'a> {
    fn of(config: &'a VecEnvConfig) -> Self {
        Shared {
            game: config.game,
            level_set: &config.level_set,
            render: config.render,
            paint_velocity: config.paint_velocity,
            cutout: config.cutout.as_ref(),
            epsilon: config.epsilon_greedy.map(|e| e.epsilon),
        }
    }

    fn start_episode(&self, slot: &mut Slot, out: &mut [u8]) -> Result<()> {
        let seed = sample_level(self.level_set, &mut slot.episode_rng)?;
        slot.env = Env::new(self.game, seed);
        slot.episode_return = 0.0;
        self.observe(slot, out);
        Ok(())
    }

    fn observe(&self, slot: &mut Slot, out: &mut [u8]) {
        if self.render {
            slot.env.render_into(self.paint_velocity, out);
            if let Some(c) = self.cutout.filter(|c| c.enabled) {
                apply_cutout(c, out, &mut slot.wrapper_rng);
            }
        }
    }

    fn step(&self, slot: &mut Slot, action: u32, out: &mut [u8]) -> Result<SlotOutput> {
        let (action, overridden) = match self.epsilon {
            Some(eps) => apply_epsilon_greedy(action, self.game.action_count() as u32, eps, &mut slot.wrapper_rng)?,
            None => (action, false),
        };
        let (reward, done) = slot.env.step(action)?;
        slot.episode_return += f64::from(reward);
        let info = EpisodeInfo {
            level_seed: slot.env.level_seed(),
            episode_steps: slot.env.step_count(),
            episode_return: slot.episode_return,
            outcome: slot.env.outcome(),
            action_overridden: overridden,
        };
        if done {
            self.start_episode(slot, out)?;
        } else {
            self.observe(slot, out);
        }
        Ok(SlotOutput { reward, done, info })
    }
}

pub struct VecEnv {
    config: VecEnvConfig,
    slots: Vec<Slot>,
    pool: Option<rayon::ThreadPool>,
    result: StepResult,
}

impl fmt::Debug for VecEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VecEnv").field("config", &self.config).finish_non_exhaustive()
    }
}

impl VecEnv {
    pub fn new(config: VecEnvConfig) -> Result<Self> {
        config.validate()?;
        let b = config.batch;
        let pool = if config.jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
            Some(pool)
        } else {
            None
        };
        let placeholder = Env::new(config.game, LevelSeed(0));
        let slots = (0..b)
            .map(|i| {
                let key = LevelSeed(config.master_seed ^ i as u32);
                Slot {
                    env: placeholder.clone(),
                    episode_rng: Rng::stream(key, StreamTag::EpisodeDynamics),
                    wrapper_rng: Rng::stream(key, StreamTag::WrapperAugmentation),
                    episode_return: 0.0,
                }
            })
            .collect();
        let blank = EpisodeInfo {
            level_seed: LevelSeed(0),
            episode_steps: 0,
            episode_return: 0.0,
            outcome: Outcome::Running,
            action_overridden: false,
        };
        let mut venv = VecEnv {
            config,
            slots,
            pool,
            result: StepResult {
                observations: vec![0; b * OBS_BYTES],
                rewards: vec![0.0; b],
                dones: vec![false; b],
                infos: vec![blank; b],
            },
        };
        venv.reset()?;
        Ok(venv)
    }

    pub fn config(&self) -> &VecEnvConfig {
        &self.config
    }

    pub fn batch(&self) -> usize {
        self.config.batch
    }

    pub fn game(&self) -> Game {
        self.config.game
    }

    /// Start a new episode in every env. Per-env streams continue, so a reset
    /// draws fresh levels rather than replaying the first ones.
    pub fn reset(&mut self) -> Result<&[u8]> {
        let shared = Shared::of(&self.config);
        for (i, (slot, out)) in self
            .slots
            .iter_mut()
            .zip(self.result.observations.chunks_exact_mut(OBS_BYTES))
            .enumerate()
        {
            shared.start_episode(slot, out)?;
            self.result.infos[i] = EpisodeInfo {
                level_seed: slot.env.level_seed(),
                episode_steps: 0,
                episode_return: 0.0,
                outcome: Outcome::Running,
                action_overridden: false,
            };
        }
        self.result.rewards.fill(0.0);
        self.result.dones.fill(false);
        Ok(&self.result.observations)
    }

    pub fn observations(&self) -> &[u8] {
        &self.result.observations
    }

    /// Current env of slot `i`.
    pub fn env(&self, i: usize) -> &Env {
        &self.slots[i].env
    }

    /// Step every env with its action. Actions are checked before any env
    /// moves, so an invalid action leaves the batch untouched.
    pub fn step_batch(&mut self, actions: &[u32]) -> Result<&StepResult> {
        let b = self.config.batch;
        if actions.len() != b {
            return Err(Error::Config(format!("expected {b} actions, got {}", actions.len())));
        }
        let n = self.config.game.action_count();
        if let Some((env, &action)) = actions.iter().enumerate().find(|(_, &a)| a as usize >= n) {
            return Err(Error::InvalidAction { env, action, n });
        }
        let shared = Shared::of(&self.config);
        let mut outputs = Vec::with_capacity(b);
        let slots = &mut self.slots;
        let obs = &mut self.result.observations;
        match &self.pool {
            Some(pool) => pool.install(|| {
                slots
                    .par_iter_mut()
                    .zip(obs.par_chunks_exact_mut(OBS_BYTES))
                    .zip(actions.par_iter())
                    .map(|((slot, out), &a)| shared.step(slot, a, out))
                    .collect_into_vec(&mut outputs)
            }),
            None => outputs.extend(
                slots
                    .iter_mut()
                    .zip(obs.chunks_exact_mut(OBS_BYTES))
                    .zip(actions)
                    .map(|((slot, out), &a)| shared.step(slot, a, out)),
            ),
        }
        for (i, out) in outputs.into_iter().enumerate() {
            let out = out.map_err(|e| match e {
                Error::InvalidAction { action, n, .. } => Error::InvalidAction { env: i, action, n },
                e => e,
            })?;
            self.result.rewards[i] = out.reward;
            self.result.dones[i] = out.done;
            self.result.infos[i] = out.info;
        }
        Ok(&self.result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn config(game: Game, b: usize, set: LevelSet) -> VecEnvConfig {
        VecEnvConfig::new(game, b, set, 1234)
    }

    #[test]
    fn level_set_parsing() {
        assert_eq!("unbounded".parse::<LevelSet>().unwrap(), LevelSet::Unbounded);
        let r: LevelSet = "range:5..8".parse().unwrap();
        assert_eq!(r.seeds().unwrap(), &[LevelSeed(5), LevelSeed(6), LevelSeed(7)]);
        assert_eq!(r.to_string(), "range:5..8");
        let s: LevelSet = "seeds:9,2".parse().unwrap();
        assert_eq!(s.to_string(), "seeds:9,2");
        assert!("seeds:1,1".parse::<LevelSet>().is_err());
        assert!("range:3..3".parse::<LevelSet>().is_err());
        assert!("most".parse::<LevelSet>().is_err());
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(serde_json::from_str::<LevelSet>(&json).unwrap(), s);
    }

    #[test]
    fn sample_from_singleton_and_empty() {
        let mut rng = Rng::from_state(1);
        let set = LevelSet::explicit([LevelSeed(7)]).unwrap();
        assert!((0..100).all(|_| sample_level(&set, &mut rng).unwrap() == LevelSeed(7)));
        let empty = LevelSet::Explicit(Vec::new().into());
        assert!(matches!(sample_level(&empty, &mut rng), Err(Error::Config(_))));
    }

    #[test]
    fn sampling_is_uniform_over_explicit_set() {
        let set = LevelSet::range(1000, 1100).unwrap();
        let mut rng = Rng::from_state(8);
        let mut counts = vec![0u32; 100];
        for _ in 0..100_000 {
            counts[(sample_level(&set, &mut rng).unwrap().0 - 1000) as usize] += 1;
        }
        let chi2: f64 = counts.iter().map(|&c| (f64::from(c) - 1000.0).powi(2) / 1000.0).sum();
        // 99 dof, p = 0.001
        assert!(chi2 < 148.23, "chi2 {chi2}");
    }

    #[test]
    fn unbounded_collisions_follow_birthday_bound() {
        let mut rng = Rng::from_state(21);
        let n = 100_000u64;
        let mut seen = HashSet::new();
        let dups = (0..n)
            .filter(|_| !seen.insert(sample_level(&LevelSet::Unbounded, &mut rng).unwrap()))
            .count();
        // expected n^2 / 2^33 = 1.16; Poisson tail beyond 8 is below 1e-5
        assert!(dups <= 8, "{dups}");
    }

    #[test]
    fn singleton_set_always_uses_that_level() {
        let set = LevelSet::explicit([LevelSeed(99)]).unwrap();
        let mut venv = VecEnv::new(config(Game::Mazes, 3, set)).unwrap();
        let mut rng = Rng::from_state(3);
        for _ in 0..2000 {
            let actions: Vec<u32> = (0..3).map(|_| rng.index(4) as u32).collect();
            let r = venv.step_batch(&actions).unwrap();
            assert!(r.infos.iter().all(|i| i.level_seed == LevelSeed(99)));
        }
    }

    #[test]
    fn same_arguments_same_first_batch() {
        for game in Game::ALL {
            let a = VecEnv::new(config(game, 4, LevelSet::Unbounded)).unwrap();
            let b = VecEnv::new(config(game, 4, LevelSet::Unbounded)).unwrap();
            assert_eq!(a.observations(), b.observations());
            assert_eq!(a.observations().len(), 4 * 64 * 64 * 3);
        }
    }

    #[test]
    fn batch_size_does_not_change_an_envs_levels() {
        let mut small = VecEnv::new(config(Game::CoinRun, 2, LevelSet::Unbounded)).unwrap();
        let mut large = VecEnv::new(config(Game::CoinRun, 5, LevelSet::Unbounded)).unwrap();
        for _ in 0..1500 {
            let a = small.step_batch(&[5, 2]).unwrap().clone();
            let b = large.step_batch(&[5, 2, 0, 1, 3]).unwrap();
            assert_eq!(a.observations[..], b.observations[..2 * OBS_BYTES]);
            assert_eq!(a.infos[..], b.infos[..2]);
        }
    }

    #[test]
    fn batch_of_one_matches_bare_env() {
        for game in Game::ALL {
            let mut venv = VecEnv::new(config(game, 1, LevelSet::Unbounded)).unwrap();
            let mut seeds = Rng::stream(LevelSeed(1234), StreamTag::EpisodeDynamics);
            let mut env = Env::new(game, sample_level(&LevelSet::Unbounded, &mut seeds).unwrap());
            assert_eq!(venv.observations(), env.render(true).as_bytes());
            let mut rng = Rng::from_state(5);
            for _ in 0..3000 {
                let a = rng.index(game.action_count()) as u32;
                let r = venv.step_batch(&[a]).unwrap();
                let (reward, done) = env.step(a).unwrap();
                assert_eq!(r.rewards[0], reward);
                assert_eq!(r.dones[0], done);
                if done {
                    env = Env::new(game, sample_level(&LevelSet::Unbounded, &mut seeds).unwrap());
                }
                assert_eq!(r.observation(0), env.render(true).as_bytes());
            }
        }
    }

    #[test]
    fn auto_reset_reports_finished_episode() {
        let mut venv = VecEnv::new(config(Game::Mazes, 8, LevelSet::Unbounded)).unwrap();
        let mut rng = Rng::from_state(6);
        let mut finished = 0;
        let mut current: Vec<LevelSeed> = (0..8).map(|i| venv.env(i).level_seed()).collect();
        for _ in 0..3000 {
            let actions: Vec<u32> = (0..8).map(|_| rng.index(4) as u32).collect();
            let r = venv.step_batch(&actions).unwrap().clone();
            for i in 0..8 {
                assert_eq!(r.infos[i].level_seed, current[i]);
                if r.dones[i] {
                    finished += 1;
                    assert!(r.infos[i].episode_steps <= 500);
                    assert_ne!(r.infos[i].outcome, Outcome::Running);
                    current[i] = venv.env(i).level_seed();
                    assert_eq!(venv.env(i).step_count(), 0);
                    assert_eq!(r.observation(i), venv.env(i).render(true).as_bytes());
                }
            }
        }
        assert!(finished >= 8 * 3000 / 500);
    }

    #[test]
    fn invalid_action_names_the_env() {
        let mut venv = VecEnv::new(config(Game::Mazes, 3, LevelSet::Unbounded)).unwrap();
        let before = venv.observations().to_vec();
        match venv.step_batch(&[0, 4, 1]) {
            Err(Error::InvalidAction { env: 1, action: 4, n: 4 }) => {}
            other => panic!("{other:?}"),
        }
        assert_eq!(venv.observations(), &before[..]);
        assert!(venv.step_batch(&[0, 1]).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(VecEnv::new(config(Game::CoinRun, 0, LevelSet::Unbounded)).is_err());
        let mut c = config(Game::CoinRun, 2, LevelSet::Unbounded);
        c.epsilon_greedy = Some(EpsilonGreedyConfig { epsilon: 2.0 });
        assert!(VecEnv::new(c).is_err());
        let mut c = config(Game::CoinRun, 2, LevelSet::Unbounded);
        c.cutout = Some(CutoutConfig { n_rects_max: 0, ..Default::default() });
        assert!(VecEnv::new(c).is_err());
    }

    #[test]
    fn threaded_stepping_matches_inline() {
        let mut c = config(Game::CoinRun, 6, LevelSet::Unbounded);
        c.cutout = Some(CutoutConfig::default());
        c.epsilon_greedy = Some(EpsilonGreedyConfig { epsilon: 0.3 });
        let mut inline = VecEnv::new(c.clone()).unwrap();
        c.jobs = 3;
        let mut threaded = VecEnv::new(c).unwrap();
        let mut rng = Rng::from_state(12);
        for _ in 0..500 {
            let actions: Vec<u32> = (0..6).map(|_| rng.index(7) as u32).collect();
            let a = inline.step_batch(&actions).unwrap().clone();
            let b = threaded.step_batch(&actions).unwrap();
            assert_eq!(a.observations, b.observations);
            assert_eq!(a.infos, b.infos);
        }
    }

    #[test]
    fn permuting_envs_permutes_outputs() {
        // env i's stream depends only on master_seed ^ i, so swapping the
        // master seed's low bit swaps envs 0 and 1
        let mut a = VecEnv::new(VecEnvConfig::new(Game::Platforms, 2, LevelSet::Unbounded, 10)).unwrap();
        let mut b = VecEnv::new(VecEnvConfig::new(Game::Platforms, 2, LevelSet::Unbounded, 11)).unwrap();
        for t in 0..1200u32 {
            let (x, y) = (t % 7, (t * 3) % 7);
            let ra = a.step_batch(&[x, y]).unwrap().clone();
            let rb = b.step_batch(&[y, x]).unwrap();
            assert_eq!(ra.observation(0), rb.observation(1));
            assert_eq!(ra.observation(1), rb.observation(0));
        }
    }
}
