//! Generate one level per game and print it as JSON plus an ASCII view.
//!
//! cargo run --example generate_levels -- 42

use procbench::levelgen::{deserialize_level, serialize_level, Level};
use procbench::rng::LevelSeed;
use procbench::Game;

fn main() -> procbench::Result<()> {
    let seed: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    for game in Game::ALL {
        let level = Level::generate(game, LevelSeed(seed));
        let json = serialize_level(&level);
        assert_eq!(serialize_level(&deserialize_level(&json)?), json);
        println!("== {game} seed {seed} ({} bytes of JSON)", json.len());
        match &level {
            Level::Platformer(p) => {
                let g = &p.grid;
                for y in (0..g.height()).rev() {
                    let row: String = (0..g.width()).map(|x| g.get(x, y).symbol()).collect();
                    println!("{row}");
                }
                println!("coins {} monsters {} max return {}", p.coins.len(), p.monsters.len(), p.max_return());
            }
            Level::Maze(m) => {
                for y in (0..m.dim).rev() {
                    let row: String = (0..m.dim).map(|x| m.cell(x, y).symbol()).collect();
                    println!("{row}");
                }
                let steps = m.shortest_path_length(m.agent_start, m.goal())?;
                println!("dim {} shortest path {steps}", m.dim);
            }
        }
    }
    Ok(())
}
