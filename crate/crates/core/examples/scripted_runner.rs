//! Success rate of the scripted CoinRun runner on the easiest levels.

use procbench::agents::CoinRunScriptedRunner;
use procbench::levelgen::{generate_coinrun, sample_difficulty};
use procbench::rng::LevelSeed;
use procbench::sim::platformer::{reset, step};

fn main() -> procbench::Result<()> {
    let seeds: Vec<LevelSeed> = (0u32..).map(LevelSeed).filter(|&s| sample_difficulty(s) == 1).take(500).collect();
    let mut wins = 0;
    for &seed in &seeds {
        let level = generate_coinrun(seed);
        let mut s = reset(&level);
        while !s.done() {
            s = step(&level, &s, CoinRunScriptedRunner::decide(&level, &s))?.0;
        }
        wins += usize::from(s.outcome.is_success());
    }
    println!("scripted runner: {wins}/{} difficulty-1 levels", seeds.len());
    Ok(())
}
