//! Cutout, epsilon-greedy and frame stacking applied by hand.

use procbench::render::Observation;
use procbench::rng::{LevelSeed, Rng, StreamTag};
use procbench::vecenv::Env;
use procbench::wrappers::{apply_cutout, apply_epsilon_greedy, expected_masked_fraction, CutoutConfig, FrameStack};
use procbench::Game;

fn main() -> procbench::Result<()> {
    let mut rng = Rng::stream(LevelSeed(1), StreamTag::WrapperAugmentation);
    let env = Env::new(Game::CoinRun, LevelSeed(3));

    let cutout = CutoutConfig::default();
    let mut obs = env.render(true);
    let rects = apply_cutout(&cutout, obs.as_mut_bytes(), &mut rng);
    println!("cutout drew {} rectangles: {rects:?}", rects.len());
    println!("expected masked fraction {:.4}", expected_masked_fraction(&cutout));

    let overrides = (0..10_000)
        .filter(|_| apply_epsilon_greedy(2, 7, 0.2, &mut rng).map(|(_, o)| o).unwrap_or(false))
        .count();
    println!("epsilon 0.2 overrode {overrides} of 10000 actions");

    let mut stack = FrameStack::new(4)?;
    let stacked = stack.reset(&obs);
    let stacked_next = stack.push(&Observation::default());
    println!("frame stack of {}: {} bytes, then {} bytes", stack.depth(), stacked.len(), stacked_next.len());
    Ok(())
}
