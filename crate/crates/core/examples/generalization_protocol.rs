//! A small train/test sweep with the random agent, printed as a table and
//! written as CSV.

use procbench::agents::RandomAgent;
use procbench::benchmark::{format_table, gap_report, run_protocol, write_runs_csv, ProtocolConfig, TrainSize};
use procbench::rng::Rng;
use procbench::Game;

fn main() -> procbench::Result<()> {
    let config = ProtocolConfig {
        game: Game::Mazes,
        train_sizes: vec![TrainSize::Finite(100), TrainSize::Finite(1000), TrainSize::Unbounded],
        test_size: 1000,
        episodes_per_eval: 500,
        runs: 3,
        master_seed: 11,
    };
    let rows = run_protocol(&config, |run| {
        Ok(Box::new(RandomAgent::new(Game::Mazes, Rng::from_state(u64::from(run)))))
    })?;
    print!("{}", format_table(&gap_report("random", false, &rows)?));
    println!();
    write_runs_csv(std::io::stdout(), &rows)?;
    Ok(())
}
