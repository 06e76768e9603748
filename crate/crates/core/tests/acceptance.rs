//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Runs with `cargo test --test acceptance`.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use procbench::agents::{certify_platforms, physics_search_oracle, replay, CoinRunScriptedRunner, RandomAgent, SearchConfig};
use procbench::benchmark::{build_level_sets, disjoint, evaluate, gap_report, ProtocolConfig, RunResult, Split, TrainSize};
use procbench::commands::measure_throughput;
use procbench::levelgen::{generate_coinrun, generate_platforms, sample_difficulty, serialize_level, Level};
use procbench::render::{decode_velocity, velocity_gray, Observation, VY_PAINT_MAX};
use procbench::rng::{LevelSeed, Rng, StreamTag};
use procbench::sim::physics::MAX_VX;
use procbench::sim::platformer::{reset, step};
use procbench::sim::Outcome;
use procbench::validate::validate_game;
use procbench::vecenv::{Env, LevelSet, VecEnv, VecEnvConfig};
use procbench::wrappers::{apply_cutout, expected_masked_fraction, CutoutConfig, EpsilonGreedyConfig};
use procbench::Game;

const FUZZ_EPISODES: u32 = 100_000;

/// Random-agent baselines on unbounded sets: 10,000 episodes, master seed 0.
const PINNED_SUCCESS_PCT: [(Game, f64); 3] = [(Game::CoinRun, 10.70), (Game::Platforms, 0.01), (Game::Mazes, 40.60)];
const PINNED_PLATFORMS_RETURN: (f64, f64) = (2.0291, 1.7854);
const BASELINE_EPISODES: usize = 10_000;

/// The sampled seeds used for solvability checks.
fn sampled_seeds(n: u32) -> Vec<LevelSeed> {
    (0..n).map(|s| LevelSeed(s.wrapping_mul(2_654_435_761))).collect()
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn determinism() -> Verdict {
    let stream = |g: Game, s: u32| {
        let json = serialize_level(&Level::generate(g, LevelSeed(s)));
        let mut env = Env::new(g, LevelSeed(s));
        let mut rng = Rng::stream(LevelSeed(s), StreamTag::EpisodeDynamics);
        let mut frames = env.render(true).as_bytes().to_vec();
        for _ in 0..200 {
            let (_, done) = env.step(rng.index(g.action_count()) as u32).unwrap();
            frames.extend_from_slice(env.render(true).as_bytes());
            if done {
                env.reset();
            }
        }
        (json, frames)
    };
    let mut mismatches = 0;
    for g in Game::ALL {
        mismatches += (0..100u32).into_par_iter().filter(|&s| stream(g, s) != stream(g, s)).count();
    }
    verdict(mismatches == 0, format!("300 level/observation streams, {mismatches} mismatches"))
}

fn maze_correctness() -> Verdict {
    let report = validate_game(Game::Mazes, 0..10_000, rayon::current_num_threads(), SearchConfig::default()).unwrap();
    let parts: Vec<String> = report.checks.iter().map(|c| format!("{} {}/{}", c.name, c.passed, c.total)).collect();
    verdict(report.ok(), parts.join(", "))
}

fn coinrun_solvability() -> Verdict {
    let seeds = sampled_seeds(100);
    let solved = seeds
        .par_iter()
        .filter(|&&s| {
            let level = generate_coinrun(s);
            physics_search_oracle(&level, SearchConfig::default()).trace().is_some_and(|t| {
                let (end, ret) = replay(&level, t);
                end.outcome == Outcome::CoinAll && ret == 10.0
            })
        })
        .count();
    let easy: Vec<LevelSeed> = (0u32..).map(LevelSeed).filter(|&s| sample_difficulty(s) == 1).take(500).collect();
    let wins = easy
        .par_iter()
        .filter(|&&s| {
            let level = generate_coinrun(s);
            let mut st = reset(&level);
            while !st.done() {
                st = step(&level, &st, CoinRunScriptedRunner::decide(&level, &st)).unwrap().0;
            }
            st.outcome == Outcome::CoinAll
        })
        .count();
    let rate = 100.0 * wins as f64 / easy.len() as f64;
    verdict(
        solved == 100 && rate >= 95.0,
        format!("search {solved}/100 replayed, scripted runner {wins}/500 = {rate:.1}% (need >= 95%)"),
    )
}

/// Episodes, return violations, length violations, best return seen.
type FuzzTally = (u32, u32, u32, f64);

fn fuzz(game: Game) -> FuzzTally {
    (0..FUZZ_EPISODES)
        .into_par_iter()
        .map(|i| {
            let mut rng = Rng::stream(LevelSeed(i), StreamTag::EpisodeDynamics);
            let seed = LevelSeed(rng.next_u32());
            let mut env = Env::new(game, seed);
            let max = match &env {
                Env::Platformer(e) => f64::from(e.level().max_return()),
                Env::Maze(_) => 10.0,
            };
            let mut ret = 0.0f64;
            loop {
                let (r, done) = env.step(rng.index(game.action_count()) as u32).unwrap();
                ret += f64::from(r);
                if done || env.step_count() > game.step_limit() {
                    break;
                }
            }
            let ok_return = match game {
                Game::Platforms => (0.0..=max).contains(&ret),
                _ => ret == 0.0 || ret == 10.0,
            };
            let ok_length = env.step_count() <= game.step_limit() && env.outcome() != Outcome::Running;
            (1, u32::from(!ok_return), u32::from(!ok_length), ret)
        })
        .reduce(|| (0, 0, 0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3.max(b.3)))
}

fn platforms_rewards(fuzzed: FuzzTally) -> Verdict {
    let seeds = sampled_seeds(200);
    let certified = seeds
        .par_iter()
        .filter(|&&s| {
            let level = generate_platforms(s);
            certify_platforms(&level, SearchConfig::default())
                .is_some_and(|c| c.certified_return == level.coins.len() as f32 + 9.0)
        })
        .count();
    let (n, over, _, best) = fuzzed;
    verdict(
        certified == 200 && over == 0,
        format!("certified coin_count+9 on {certified}/200; {over} of {n} random episodes exceeded it (best {best})"),
    )
}

fn reward_bounds(fuzzed: &[(Game, FuzzTally)]) -> Verdict {
    let parts: Vec<String> = fuzzed
        .iter()
        .map(|(g, (n, bad_ret, bad_len, _))| format!("{g}: {n} episodes, {bad_ret} bad returns, {bad_len} bad lengths"))
        .collect();
    let pass = fuzzed.iter().all(|(_, (n, r, l, _))| *n == FUZZ_EPISODES && *r == 0 && *l == 0);
    verdict(pass, parts.join("; "))
}

fn wrapper_statistics() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for eps in [0.1, 0.2, 0.5] {
        let batch = 10;
        let mut config = VecEnvConfig::new(Game::CoinRun, batch, LevelSet::Unbounded, 5);
        config.epsilon_greedy = Some(EpsilonGreedyConfig { epsilon: eps });
        config.render = false;
        let mut venv = VecEnv::new(config).unwrap();
        venv.reset().unwrap();
        let mut overridden = 0usize;
        let steps = 10_000;
        for _ in 0..steps {
            let res = venv.step_batch(&[2; 10]).unwrap();
            overridden += res.infos.iter().filter(|i| i.action_overridden).count();
        }
        let rate = overridden as f64 / (steps * batch) as f64;
        pass &= (rate - eps).abs() <= 0.01;
        parts.push(format!("eps {eps}: rate {rate:.4}"));
    }

    let config = CutoutConfig::default();
    let expected = expected_masked_fraction(&config);
    let mut rng = Rng::from_state(2024);
    let base = Env::new(Game::CoinRun, LevelSeed(1)).render(true);
    let n = 20_000;
    let mut covered = 0usize;
    let mut leaks = 0usize;
    for _ in 0..n {
        let mut obs: Observation = base.clone();
        let rects = apply_cutout(&config, obs.as_mut_bytes(), &mut rng);
        for row in 0..64 {
            for col in 0..64 {
                if rects.iter().any(|r| r.contains(row, col)) {
                    covered += 1;
                } else if obs.pixel(row, col) != base.pixel(row, col) {
                    leaks += 1;
                }
            }
        }
    }
    let measured = covered as f64 / (n as f64 * 4096.0);
    let rel = measured / expected - 1.0;
    pass &= leaks == 0 && rel.abs() <= 0.02;
    parts.push(format!(
        "cutout: {leaks} changed pixels outside rects, masked {measured:.5} vs analytic {expected:.5} ({:+.2}%)",
        100.0 * rel
    ));
    verdict(pass, parts.join("; "))
}

fn protocol_structure() -> Verdict {
    let config = ProtocolConfig::preset(Game::CoinRun, 0);
    let mut pairs = 0;
    let mut overlapping = 0;
    for &size in &config.train_sizes {
        for run in 0..config.runs {
            let (train, test) = build_level_sets(&config, size, run).unwrap();
            pairs += 1;
            let sized = test.len() == Some(10_000) && train.len().map(|n| n as u64) == Some(size.count()).filter(|&c| c > 0);
            let sized = sized || (size == TrainSize::Unbounded && train == LevelSet::Unbounded);
            if !disjoint(&train, &test) || !sized {
                overlapping += 1;
            }
        }
    }

    let set = LevelSet::range(0, 100).unwrap();
    let row = |split| {
        let mut agent = RandomAgent::new(Game::CoinRun, Rng::from_state(3));
        let stats = evaluate(&mut agent, Game::CoinRun, &set, 1000, 8).unwrap();
        RunResult::new(Game::CoinRun, TrainSize::Finite(100), 0, split, &stats)
    };
    let gap = gap_report("random", false, &[row(Split::Train), row(Split::Test)]).unwrap().rows[0].gap;
    let sizes: Vec<String> = config.train_sizes.iter().map(|s| s.label()).collect();
    verdict(
        overlapping == 0 && gap == 0.0,
        format!(
            "{pairs} train/test pairs over sizes {{{}}}, {overlapping} overlapping or missized; degenerate gap {gap}",
            sizes.join(",")
        ),
    )
}

fn velocity_painting() -> Verdict {
    let mut rng = Rng::from_state(99);
    let mut worst = 0.0f64;
    let mut endpoints_ok = true;
    for max in [MAX_VX, VY_PAINT_MAX] {
        for _ in 0..1000 {
            let v = (rng.next_u64() as f64 / u64::MAX as f64 * 2.0 - 1.0) * max;
            let err = (decode_velocity(velocity_gray(v, max), max) - v).abs() / (2.0 * max);
            worst = worst.max(err);
        }
        endpoints_ok &= velocity_gray(-max, max) == 0 && velocity_gray(max, max) == 255;
    }
    verdict(
        worst <= 1.0 / 255.0 && endpoints_ok,
        format!("worst error {:.3}/255 of range over 2000 values; endpoints exact: {endpoints_ok}", worst * 255.0),
    )
}

fn throughput() -> Verdict {
    let no_render = measure_throughput(Game::CoinRun, 64, 3000, false, 0, 1).unwrap();
    let render = measure_throughput(Game::CoinRun, 64, 300, true, 0, 1).unwrap();
    verdict(
        no_render >= 25_000.0 && render >= 2_500.0,
        format!("coinrun batch 64: {no_render:.0} steps/s without render (target 50000), {render:.0} obs/s with render (target 5000)"),
    )
}

fn baseline_pinning() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    let n = BASELINE_EPISODES as f64;
    for (game, pinned) in PINNED_SUCCESS_PCT {
        let mut agent = RandomAgent::new(game, Rng::from_state(1));
        let stats = evaluate(&mut agent, game, &LevelSet::Unbounded, BASELINE_EPISODES, 1).unwrap();
        let p = pinned / 100.0;
        let band = 300.0 * (p * (1.0 - p) / n).sqrt();
        let ok = (stats.success_rate_percent - pinned).abs() <= band;
        pass &= ok;
        parts.push(format!("{game} {:.2}% (pinned {pinned:.2} ± {band:.2})", stats.success_rate_percent));
        if game == Game::Platforms {
            let (mean, sd) = PINNED_PLATFORMS_RETURN;
            let band = 3.0 * sd / n.sqrt();
            pass &= (stats.mean_return - mean).abs() <= band;
            parts.push(format!("platforms return {:.4} (pinned {mean} ± {band:.4})", stats.mean_return));
        }
    }
    verdict(pass, parts.join("; "))
}

fn main() {
    let mut results: Vec<(&str, Verdict, Duration)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let out = f();
        let took = t.elapsed();
        println!(
            "{} {name}: {} [{:.1}s]",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
        results.push((name, out, took));
    };

    run("determinism", &mut determinism);
    run("maze correctness", &mut maze_correctness);
    run("coinrun solvability", &mut coinrun_solvability);
    let mut fuzzed = Vec::new();
    run("reward and termination bounds", &mut || {
        fuzzed = Game::ALL.iter().map(|&g| (g, fuzz(g))).collect();
        reward_bounds(&fuzzed)
    });
    let platforms_fuzz = fuzzed.iter().find(|(g, _)| *g == Game::Platforms).unwrap().1;
    run("platforms reward structure", &mut || platforms_rewards(platforms_fuzz));
    run("wrapper statistics", &mut wrapper_statistics);
    run("protocol structure", &mut protocol_structure);
    run("velocity painting", &mut velocity_painting);
    run("throughput", &mut throughput);
    run("baseline pinning", &mut baseline_pinning);

    let limits = [("determinism", 60.0), ("maze correctness", 60.0), ("coinrun solvability", 600.0)];
    let mut failed = results.iter().filter(|(_, o, _)| !o.pass).count();
    for (name, secs) in limits {
        if let Some((_, _, took)) = results.iter().find(|(n, _, _)| *n == name) {
            if took.as_secs_f64() > secs {
                println!("FAIL {name}: runtime {:.1}s over the {secs}s limit", took.as_secs_f64());
                failed += 1;
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", results.len() - failed.min(results.len()), results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
