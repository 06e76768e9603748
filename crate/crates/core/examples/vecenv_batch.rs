//! Drive a batch of environments through the flat step API, the way a
//! training loop would.

use procbench::vecenv::{LevelSet, VecEnv, VecEnvConfig};
use procbench::wrappers::{CutoutConfig, EpsilonGreedyConfig};
use procbench::Game;

fn main() -> procbench::Result<()> {
    let mut config = VecEnvConfig::new(Game::CoinRun, 8, "range:0..500".parse::<LevelSet>()?, 7);
    config.cutout = Some(CutoutConfig::default());
    config.epsilon_greedy = Some(EpsilonGreedyConfig { epsilon: 0.1 });
    let mut venv = VecEnv::new(config)?;
    let first = venv.reset()?;
    println!("observation buffer: {} bytes = 8 x 64 x 64 x 3", first.len());

    let mut finished = 0;
    let mut returns = 0.0;
    for t in 0..2000u32 {
        // run right, jump every fifth step
        let actions: Vec<u32> = (0..8).map(|i| if (t + i) % 5 == 0 { 5 } else { 2 }).collect();
        let res = venv.step_batch(&actions)?;
        for (done, info) in res.dones.iter().zip(&res.infos) {
            if *done {
                finished += 1;
                returns += info.episode_return;
            }
        }
    }
    println!("{finished} episodes finished, mean return {:.2}", returns / f64::from(finished.max(1)));
    Ok(())
}
