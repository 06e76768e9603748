//! Parse a benchmark config file and show the effective settings.

use procbench::config::FileConfig;

const EXAMPLE: &str = r#"
game = "coinrun"
master_seed = 3
episodes = 2000
train_sizes = [100, 500, "inf"]
runs = 5

[cutout]
n_rects_max = 4

[epsilon_greedy]
epsilon = 0.1
"#;

fn main() -> procbench::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => FileConfig::load(path.as_ref())?,
        None => FileConfig::from_toml(EXAMPLE)?,
    };
    println!("{}", serde_json::to_string_pretty(&config).expect("config serializes"));
    Ok(())
}
