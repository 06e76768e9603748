//! Train/test generalization protocol: disjoint level sets, zero-shot
//! evaluation, and reports in the standard results-table layout.

mod preset;
mod report;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::agents::Agent;
use crate::error::{Error, Result};
use crate::render::OBS_BYTES;
use crate::rng::{LevelSeed, Rng, StreamTag};
use crate::vecenv::{sample_level, Env, LevelSet};
use crate::Game;

pub use preset::TrainingPreset;
pub use report::{
    format_cell, format_table, format_value, gap_report, read_runs_csv, read_runs_json, write_runs_csv,
    write_runs_json, EvalReport, GapRow, RunResult, Split,
};

/// Size of the 32-bit level seed space.
pub const SEED_SPACE: u64 = 1 << 32;

/// Number of training levels, or the unbounded regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrainSize {
    Finite(u32),
    Unbounded,
}

impl TrainSize {
    /// Training-set sizes of the published results tables for `game`.
    pub fn preset(game: Game) -> Vec<TrainSize> {
        let finite: &[u32] = match game {
            Game::CoinRun => &[100, 500, 1000, 2000, 4000, 8000, 12000, 16000],
            Game::Platforms => &[100, 400, 1600, 6400, 25600, 102400, 409600],
            Game::Mazes => &[1000, 2000, 4000, 8000, 16000, 32000, 64000, 128000, 256000],
        };
        finite
            .iter()
            .map(|&n| TrainSize::Finite(n))
            .chain(std::iter::once(TrainSize::Unbounded))
            .collect()
    }

    pub fn count(self) -> u64 {
        match self {
            TrainSize::Finite(n) => u64::from(n),
            TrainSize::Unbounded => 0,
        }
    }

    /// The table label: the count, or `∞`.
    pub fn label(self) -> String {
        match self {
            TrainSize::Finite(n) => n.to_string(),
            TrainSize::Unbounded => "∞".to_owned(),
        }
    }
}

impl fmt::Display for TrainSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainSize::Finite(n) => write!(f, "{n}"),
            TrainSize::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for TrainSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "∞" | "unbounded" => Ok(TrainSize::Unbounded),
            t => match t.parse::<u32>() {
                Ok(0) => Err(Error::Config("train size must be at least 1".into())),
                Ok(n) => Ok(TrainSize::Finite(n)),
                Err(_) => Err(Error::Config(format!("bad train size {s:?}: expected a count or \"inf\""))),
            },
        }
    }
}

impl Serialize for TrainSize {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TrainSize::Finite(n) => s.serialize_u32(*n),
            TrainSize::Unbounded => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for TrainSize {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;

        impl de::Visitor<'_> for V {
            type Value = TrainSize;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive level count or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<TrainSize, E> {
                match u32::try_from(v) {
                    Ok(n) if n > 0 => Ok(TrainSize::Finite(n)),
                    _ => Err(E::custom(format!("train size {v} outside 1..=2^32-1"))),
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<TrainSize, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom(format!("negative train size {v}")))
                    .and_then(|v| self.visit_u64(v))
            }

            // csv infers "inf" as a float
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<TrainSize, E> {
                if v == f64::INFINITY {
                    Ok(TrainSize::Unbounded)
                } else if v.fract() == 0.0 && v >= 1.0 && v < SEED_SPACE as f64 {
                    Ok(TrainSize::Finite(v as u32))
                } else {
                    Err(E::custom(format!("bad train size {v}")))
                }
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<TrainSize, E> {
                v.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    pub game: Game,
    pub train_sizes: Vec<TrainSize>,
    /// Distinct test seeds per run.
    #[serde(default = "default_test_size")]
    pub test_size: u32,
    #[serde(default = "default_episodes")]
    pub episodes_per_eval: usize,
    /// Independent train sets (and evaluations) per size.
    #[serde(default = "default_runs")]
    pub runs: u32,
    #[serde(default)]
    pub master_seed: u32,
}

fn default_test_size() -> u32 {
    10_000
}

fn default_episodes() -> usize {
    10_000
}

fn default_runs() -> u32 {
    5
}

impl ProtocolConfig {
    /// The published size grid for `game` with default counts.
    pub fn preset(game: Game, master_seed: u32) -> Self {
        ProtocolConfig {
            game,
            train_sizes: TrainSize::preset(game),
            test_size: default_test_size(),
            episodes_per_eval: default_episodes(),
            runs: default_runs(),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.train_sizes.is_empty() {
            return Err(Error::Config("train_sizes is empty".into()));
        }
        if self.train_sizes.contains(&TrainSize::Finite(0)) {
            return Err(Error::Config("train size must be at least 1".into()));
        }
        if self.test_size == 0 {
            return Err(Error::Config("test_size must be at least 1".into()));
        }
        if self.episodes_per_eval == 0 {
            return Err(Error::Config("episodes_per_eval must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// The per-run protocol stream, keyed by master seed, run and size.
fn protocol_rng(master_seed: u32, size: TrainSize, run_index: u32) -> Rng {
    let mut base = Rng::stream(LevelSeed(master_seed), StreamTag::Protocol);
    let size_key = match size {
        TrainSize::Finite(n) => u64::from(n),
        TrainSize::Unbounded => SEED_SPACE,
    };
    let mut rng = Rng::from_state(base.next_u64() ^ size_key.wrapping_mul(0xD1B5_4A32_D192_ED03));
    for _ in 0..run_index {
        rng.next_u64();
    }
    Rng::from_state(rng.next_u64())
}

fn draw_distinct(rng: &mut Rng, n: u32, taken: &HashSet<u32>) -> Vec<LevelSeed> {
    let mut seen = HashSet::with_capacity(n as usize);
    let mut out = Vec::with_capacity(n as usize);
    while out.len() < n as usize {
        let s = rng.next_u32();
        if !taken.contains(&s) && seen.insert(s) {
            out.push(LevelSeed(s));
        }
    }
    out
}

/// Train and test sets for one run of one size. Test seeds are drawn by
/// rejection against the train seeds; with an unbounded train set the test
/// set is only internally distinct.
pub fn build_level_sets(config: &ProtocolConfig, size: TrainSize, run_index: u32) -> Result<(LevelSet, LevelSet)> {
    if size == TrainSize::Finite(0) || config.test_size == 0 {
        return Err(Error::Config("train and test sizes must be at least 1".into()));
    }
    let train_n = size.count();
    let test_n = u64::from(config.test_size);
    if train_n + test_n > SEED_SPACE {
        return Err(Error::Infeasible {
            train: train_n,
            test: test_n,
        });
    }
    let mut rng = protocol_rng(config.master_seed, size, run_index);
    let (train, taken) = match size {
        TrainSize::Finite(n) => {
            let seeds = draw_distinct(&mut rng, n, &HashSet::new());
            let taken = seeds.iter().map(|s| s.0).collect();
            (LevelSet::explicit(seeds)?, taken)
        }
        TrainSize::Unbounded => (LevelSet::Unbounded, HashSet::new()),
    };
    let test = LevelSet::explicit(draw_distinct(&mut rng, config.test_size, &taken))?;
    Ok((train, test))
}

/// True when no seed lies in both sets. Unbounded sets are disjoint from
/// everything by convention.
pub fn disjoint(a: &LevelSet, b: &LevelSet) -> bool {
    match (a.seeds(), b.seeds()) {
        (Some(xs), Some(_)) => !xs.iter().any(|&s| b.contains(s)),
        _ => true,
    }
}

/// Zero-shot statistics over a batch of episodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalStats {
    pub episodes: usize,
    pub mean_return: f64,
    /// Population standard deviation of per-episode return.
    pub std_return: f64,
    pub success_rate_percent: f64,
    pub mean_episode_length: f64,
}

/// Sums that combine associatively, so any episode partition aggregates to
/// the same statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalAccumulator {
    pub episodes: usize,
    pub successes: usize,
    pub return_sum: f64,
    pub return_sq_sum: f64,
    pub length_sum: u64,
}

impl EvalAccumulator {
    pub fn record(&mut self, ret: f64, length: u32, success: bool) {
        self.episodes += 1;
        self.successes += usize::from(success);
        self.return_sum += ret;
        self.return_sq_sum += ret * ret;
        self.length_sum += u64::from(length);
    }

    pub fn merge(mut self, other: &EvalAccumulator) -> Self {
        self.episodes += other.episodes;
        self.successes += other.successes;
        self.return_sum += other.return_sum;
        self.return_sq_sum += other.return_sq_sum;
        self.length_sum += other.length_sum;
        self
    }

    pub fn stats(&self) -> EvalStats {
        let n = self.episodes.max(1) as f64;
        let mean = self.return_sum / n;
        let var = (self.return_sq_sum / n - mean * mean).max(0.0);
        EvalStats {
            episodes: self.episodes,
            mean_return: mean,
            std_return: var.sqrt(),
            success_rate_percent: 100.0 * self.successes as f64 / n,
            mean_episode_length: self.length_sum as f64 / n,
        }
    }
}

/// Runs `episodes` episodes with levels drawn from `set`, no wrappers
/// applied. Non-observing agents get an empty frame; only privileged agents
/// see the env.
pub fn evaluate(agent: &mut dyn Agent, game: Game, set: &LevelSet, episodes: usize, seed: u32) -> Result<EvalStats> {
    if episodes == 0 {
        return Err(Error::Config("episodes must be at least 1".into()));
    }
    let mut rng = Rng::stream(LevelSeed(seed), StreamTag::EpisodeDynamics);
    let mut acc = EvalAccumulator::default();
    let mut frame = vec![0u8; OBS_BYTES];
    let privileged = agent.privileged();
    let observes = agent.observes();
    let actions = game.action_count() as u32;
    for episode in 0..episodes {
        let level = sample_level(set, &mut rng)?;
        let mut env = Env::new(game, level);
        let fault = |step: u32, source| Error::Agent { episode, step, source };
        agent.reset(privileged.then_some(&env)).map_err(|e| fault(0, e))?;
        let mut ret = 0.0f64;
        loop {
            let step = env.step_count();
            let obs: &[u8] = if observes {
                env.render_into(true, &mut frame);
                &frame
            } else {
                &[]
            };
            let a = agent.act(obs, privileged.then_some(&env)).map_err(|e| fault(step, e))?;
            if a >= actions {
                return Err(fault(step, format!("action {a} outside 0..{actions}").into()));
            }
            let (r, done) = env.step(a)?;
            ret += f64::from(r);
            if done {
                break;
            }
        }
        acc.record(ret, env.step_count(), env.outcome().is_success());
    }
    Ok(acc.stats())
}

/// Every (size, run, split) evaluation for one agent. `make_agent` builds a
/// fresh agent for each run.
pub fn run_protocol(
    config: &ProtocolConfig,
    mut make_agent: impl FnMut(u32) -> Result<Box<dyn Agent>>,
) -> Result<Vec<RunResult>> {
    config.validate()?;
    let mut rows = Vec::new();
    for &size in &config.train_sizes {
        for run in 0..config.runs {
            let (train, test) = build_level_sets(config, size, run)?;
            if !disjoint(&train, &test) {
                return Err(Error::Config(format!("train and test overlap for size {size} run {run}")));
            }
            let eval_seed = config.master_seed.wrapping_add(run);
            for (split, set) in [(Split::Train, &train), (Split::Test, &test)] {
                let mut agent = make_agent(run)?;
                let stats = evaluate(agent.as_mut(), config.game, set, config.episodes_per_eval, eval_seed)?;
                rows.push(RunResult::new(config.game, size, run, split, &stats));
            }
        }
    }
    Ok(rows)
}
