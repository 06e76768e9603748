//! Steps per second for every game, with and without rendering.

use procbench::commands::measure_throughput;
use procbench::Game;

fn main() -> procbench::Result<()> {
    for game in Game::ALL {
        for render in [false, true] {
            let rate = measure_throughput(game, 64, 500, render, 0, 1)?;
            println!("game={game} batch=64 render={render} steps_per_sec={rate:.1}");
        }
    }
    Ok(())
}
