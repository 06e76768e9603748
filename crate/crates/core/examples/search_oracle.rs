//! Certify CoinRun and Platforms levels with the physics search and replay
//! the witness traces.

use procbench::agents::{certify_platforms, physics_search_oracle, replay, SearchConfig};
use procbench::levelgen::{generate_coinrun, generate_platforms};
use procbench::rng::LevelSeed;

fn main() {
    let config = SearchConfig::default();
    for s in 0..5 {
        let level = generate_coinrun(LevelSeed(s));
        let outcome = physics_search_oracle(&level, config);
        let replayed = outcome.trace().map(|t| replay(&level, t).1);
        println!(
            "coinrun {s}: solved {} in {} steps, {} states, replay return {replayed:?}",
            outcome.is_solved(),
            outcome.trace().map_or(0, <[_]>::len),
            outcome.stats().states
        );
    }
    for s in 0..3 {
        let level = generate_platforms(LevelSeed(s));
        match certify_platforms(&level, config) {
            Some(c) => println!(
                "platforms {s}: {} coins, certified return {} of {}",
                level.coins.len(),
                c.certified_return,
                level.max_return()
            ),
            None => println!("platforms {s}: no certificate"),
        }
    }
}
