//! The BFS oracle walks every maze in a seed range to the goal.

use procbench::agents::MazeBfsOracle;
use procbench::benchmark::evaluate;
use procbench::vecenv::LevelSet;
use procbench::Game;

fn main() -> procbench::Result<()> {
    let set = LevelSet::range(0, 1000)?;
    let stats = evaluate(&mut MazeBfsOracle::default(), Game::Mazes, &set, 1000, 0)?;
    println!(
        "bfs oracle: success {}% mean length {:.1} steps",
        stats.success_rate_percent, stats.mean_episode_length
    );
    Ok(())
}
