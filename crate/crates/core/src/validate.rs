//! Per-game invariant suite over a range of level seeds.

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::agents::{certify_platforms, physics_search_oracle, replay, SearchConfig};
use crate::error::{Error, Result};
use crate::levelgen::{scan_corridor, Level, MazeLevel, PlatformerLevel};
use crate::rng::{LevelSeed, Rng, StreamTag};
use crate::sim::maze::{self, MazeAction};
use crate::sim::Outcome;
use crate::vecenv::Env;
use crate::Game;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    /// First few failing seeds.
    pub failures: Vec<u32>,
}

impl CheckCount {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub game: Game,
    pub checks: Vec<CheckCount>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(CheckCount::ok)
    }
}

const MAX_LISTED_FAILURES: usize = 10;

/// Check names run for `game`, in report order.
pub fn check_names(game: Game) -> &'static [&'static str] {
    match game {
        Game::CoinRun => &["corridor", "search", "bounds"],
        Game::Platforms => &["certificate", "bounds"],
        Game::Mazes => &["tree", "oracle", "bounds"],
    }
}

fn maze_oracle_ok(level: &MazeLevel) -> bool {
    let Ok(path) = level.path(level.agent_start, level.goal()) else {
        return false;
    };
    let mut s = maze::reset(level);
    let mut ret = 0.0;
    for w in path.windows(2) {
        let Some(a) = MazeAction::between(w[0], w[1]) else {
            return false;
        };
        match maze::step(level, &s, a) {
            Ok((n, r)) => {
                s = n;
                ret += r;
            }
            Err(_) => return false,
        }
    }
    s.outcome == Outcome::Goal && ret == 10.0
}

fn coinrun_search_ok(level: &PlatformerLevel, config: SearchConfig) -> bool {
    physics_search_oracle(level, config).trace().is_some_and(|t| {
        let (s, ret) = replay(level, t);
        s.outcome == Outcome::CoinAll && ret == 10.0
    })
}

fn platforms_certificate_ok(level: &PlatformerLevel, config: SearchConfig) -> bool {
    certify_platforms(level, config).is_some_and(|c| c.certified_return == level.max_return())
}

/// One uniformly random episode: return within the game's bounds and the
/// episode ends within its step limit.
pub fn random_episode_in_bounds(game: Game, seed: LevelSeed) -> bool {
    let mut env = Env::new(game, seed);
    let max = match &env {
        Env::Platformer(e) => f64::from(e.level().max_return()),
        Env::Maze(_) => 10.0,
    };
    let mut rng = Rng::stream(seed, StreamTag::EpisodeDynamics);
    let mut ret = 0.0f64;
    loop {
        let Ok((r, done)) = env.step(rng.index(game.action_count()) as u32) else {
            return false;
        };
        ret += f64::from(r);
        if done {
            break;
        }
    }
    let allowed = match game {
        Game::Platforms => (0.0..=max).contains(&ret),
        _ => ret == 0.0 || ret == 10.0,
    };
    allowed && env.step_count() <= game.step_limit()
}

fn run_check(game: Game, seed: LevelSeed, level: &Level, name: &str, search: SearchConfig) -> bool {
    match (name, level) {
        ("tree", Level::Maze(m)) => m.is_perfect(),
        ("oracle", Level::Maze(m)) => maze_oracle_ok(m),
        ("corridor", Level::Platformer(p)) => scan_corridor(p).within_limits(),
        ("search", Level::Platformer(p)) => coinrun_search_ok(p, search),
        ("certificate", Level::Platformer(p)) => platforms_certificate_ok(p, search),
        ("bounds", _) => random_episode_in_bounds(game, seed),
        _ => false,
    }
}

/// Runs every check for `game` on each seed in `seeds`, across `jobs`
/// threads.
pub fn validate_game(game: Game, seeds: Range<u32>, jobs: usize, search: SearchConfig) -> Result<ValidationReport> {
    let names = check_names(game);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<(u32, Vec<bool>)> = pool.install(|| {
        seeds
            .into_par_iter()
            .map(|s| {
                let level = Level::generate(game, LevelSeed(s));
                let passed = names.iter().map(|n| run_check(game, LevelSeed(s), &level, n, search)).collect();
                (s, passed)
            })
            .collect()
    });
    let checks = names
        .iter()
        .enumerate()
        .map(|(i, &name)| CheckCount {
            name,
            passed: results.iter().filter(|(_, p)| p[i]).count(),
            total: results.len(),
            failures: results
                .iter()
                .filter(|(_, p)| !p[i])
                .map(|(s, _)| *s)
                .take(MAX_LISTED_FAILURES)
                .collect(),
        })
        .collect();
    Ok(ValidationReport { game, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mazes_pass_every_check() {
        let report = validate_game(Game::Mazes, 0..100, 2, SearchConfig::default()).unwrap();
        assert!(report.ok(), "{report:?}");
        assert_eq!(report.checks.len(), 3);
        assert!(report.checks.iter().all(|c| c.total == 100));
    }

    #[test]
    fn coinrun_sample_passes() {
        let report = validate_game(Game::CoinRun, 0..8, 2, SearchConfig::default()).unwrap();
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn starved_search_is_reported_not_hidden() {
        let tiny = SearchConfig {
            budget: 10,
            ..SearchConfig::default()
        };
        let report = validate_game(Game::CoinRun, 0..4, 1, tiny).unwrap();
        let search = report.checks.iter().find(|c| c.name == "search").unwrap();
        assert_eq!(search.passed, 0);
        assert_eq!(search.failures, [0, 1, 2, 3]);
        assert!(!report.ok());
    }
}
