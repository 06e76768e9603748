//! Play a short CoinRun episode with random actions and write PPM frames.
//!
//! cargo run --example render_episode -- /tmp/frames

use procbench::render::write_ppm;
use procbench::rng::{LevelSeed, Rng, StreamTag};
use procbench::vecenv::Env;
use procbench::Game;

fn main() -> procbench::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "frames".into());
    std::fs::create_dir_all(&dir).expect("create output dir");
    let mut env = Env::new(Game::CoinRun, LevelSeed(42));
    let mut rng = Rng::stream(LevelSeed(0), StreamTag::EpisodeDynamics);
    let mut t = 0;
    loop {
        write_ppm(&env.render(true), format!("{dir}/frame_{t:05}.ppm"))?;
        if t == 60 {
            break;
        }
        let (_, done) = env.step(rng.index(Game::CoinRun.action_count()) as u32)?;
        t += 1;
        if done {
            write_ppm(&env.render(true), format!("{dir}/frame_{t:05}.ppm"))?;
            break;
        }
    }
    println!("wrote {} frames to {dir}, outcome {:?}", t + 1, env.outcome());
    Ok(())
}
