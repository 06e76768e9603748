//! CoinRun layouts: a left-to-right run of ground sections ending in a coin.
//!
//! Draw order is part of the level format. The layout stream draws the
//! difficulty, the section count, the starting floor height, then per section
//! (gap, lava, height delta, length, saw, crate stack); the entities stream
//! draws monsters; the palette stream draws the background hue.

use crate::levelgen::{MonsterSpec, PlatformerLevel, PlatformerVariant, TileGrid, TileKind, TilePos};
use crate::rng::{LevelSeed, Rng, StreamTag};
use crate::sim::physics::{MAX_GAP, MAX_STEP_UP};

pub const COINRUN_HEIGHT: i32 = 20;
const MIN_FLOOR: i32 = 2;
const MAX_FLOOR: i32 = COINRUN_HEIGHT - 8;
const MIN_MONSTER_RUN: i32 = 4;
const PLACEMENT_RETRIES: usize = 8;

#[derive(Debug, Clone)]
struct Section {
    x0: i32,
    len: i32,
    floor: i32,
    saw: Option<i32>,
    /// Column and height of a crate stack.
    crate_stack: Option<(i32, i32)>,
}

/// Difficulty in `{1, 2, 3}`, the first draw of the layout stream.
pub fn sample_difficulty(seed: LevelSeed) -> u8 {
    let mut layout = Rng::stream(seed, StreamTag::Layout);
    layout.range(1, 3) as u8
}

pub fn generate_coinrun(seed: LevelSeed) -> PlatformerLevel {
    let mut layout = Rng::stream(seed, StreamTag::Layout);
    let difficulty = layout.range(1, 3);
    let d = difficulty as f64;
    let n_sections = layout.range(1 + difficulty, 2 + 2 * difficulty);
    let mut floor = layout.range(i64::from(MIN_FLOOR), 5) as i32;

    let mut sections = Vec::with_capacity(n_sections as usize);
    let mut gaps: Vec<(i32, i32, bool)> = Vec::new();
    // column 0 is the left wall
    let mut x = 1;
    for i in 0..n_sections {
        if i > 0 {
            if layout.chance(0.2 * d) {
                let width = layout.range(1, i64::from(MAX_GAP)) as i32;
                let lava = layout.chance(0.5);
                gaps.push((x, width, lava));
                x += width;
            }
            let delta = layout.range(-i64::from(MAX_STEP_UP), i64::from(MAX_STEP_UP)) as i32;
            floor = (floor + delta).clamp(MIN_FLOOR, MAX_FLOOR);
        }
        let len = layout.range(5, 4 + 3 * difficulty) as i32;
        let mut section = Section {
            x0: x,
            len,
            floor,
            saw: None,
            crate_stack: None,
        };
        // the spawn section stays hazard free
        if layout.chance(0.15 * d) && i > 0 {
            section.saw = Some(layout.range(i64::from(x + 2), i64::from(x + len - 3)) as i32);
        }
        if layout.chance(0.2) {
            let height = layout.range(1, i64::from(MAX_STEP_UP)) as i32;
            for _ in 0..PLACEMENT_RETRIES {
                let col = layout.range(i64::from(x + 1), i64::from(x + len - 2)) as i32;
                if section.saw.is_none_or(|s| (s - col).abs() >= 3) {
                    section.crate_stack = Some((col, height));
                    break;
                }
            }
        }
        sections.push(section);
        x += len;
    }
    let width = x + 1;

    let mut grid = TileGrid::new(width, COINRUN_HEIGHT);
    for y in 0..COINRUN_HEIGHT {
        grid.set(0, y, TileKind::Wall);
        grid.set(width - 1, y, TileKind::Wall);
    }
    for s in &sections {
        for cx in s.x0..s.x0 + s.len {
            for y in 0..s.floor {
                grid.set(cx, y, TileKind::Ground);
            }
        }
        if let Some(col) = s.saw {
            grid.set(col, s.floor, TileKind::Saw);
        }
        if let Some((col, height)) = s.crate_stack {
            for y in s.floor..s.floor + height {
                grid.set(col, y, TileKind::Crate);
            }
        }
    }
    for &(gx, gw, lava) in &gaps {
        if lava {
            for cx in gx..gx + gw {
                grid.set(cx, 0, TileKind::Lava);
            }
        }
    }

    let first = &sections[0];
    let last = &sections[sections.len() - 1];
    let agent_spawn = TilePos::new(first.x0, first.floor);
    let coin = TilePos::new(last.x0 + last.len - 1, last.floor);
    grid.set(coin.x, coin.y, TileKind::Coin);

    let mut entities = Rng::stream(seed, StreamTag::Entities);
    let n_monsters = entities.range(0, difficulty);
    let runs = monster_runs(&sections, coin);
    let mut monsters = Vec::new();
    for _ in 0..n_monsters {
        if runs.is_empty() {
            break;
        }
        let (start, end) = runs[entities.index(runs.len())];
        let speed = entities.range(1, 3) as f64 * 0.05;
        let initial_phase = entities.range(0, 63) as f64 / 64.0;
        monsters.push(MonsterSpec {
            patrol_start: start,
            patrol_end: end,
            speed,
            initial_phase,
        });
    }

    let mut palette = Rng::stream(seed, StreamTag::Palette);
    let palette_hue = palette.range(0, 359) as u16;

    PlatformerLevel {
        seed,
        variant: PlatformerVariant::CoinRun {
            difficulty: difficulty as u8,
        },
        grid,
        agent_spawn,
        coins: vec![coin],
        monsters,
        palette_hue,
    }
}

/// Hazard-free stretches of at least [`MIN_MONSTER_RUN`] columns, outside the
/// spawn section.
fn monster_runs(sections: &[Section], coin: TilePos) -> Vec<(TilePos, TilePos)> {
    let mut runs = Vec::new();
    for s in sections.iter().skip(1) {
        let blocked = |cx: i32| {
            s.saw.is_some_and(|c| (c - cx).abs() <= 1)
                || s.crate_stack.is_some_and(|(c, _)| (c - cx).abs() <= 1)
                || cx == coin.x
        };
        let mut run_start = None;
        for cx in s.x0..=s.x0 + s.len {
            let free = cx < s.x0 + s.len && !blocked(cx);
            match (free, run_start) {
                (true, None) => run_start = Some(cx),
                (false, Some(a)) => {
                    if cx - a >= MIN_MONSTER_RUN {
                        runs.push((TilePos::new(a, s.floor), TilePos::new(cx - 1, s.floor)));
                    }
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    runs
}

/// Result of walking the ground profile from spawn to coin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorridorScan {
    /// Widest run of pit columns.
    pub max_gap: i32,
    /// Largest rise between consecutive ground columns, across pits.
    pub max_step_up: i32,
}

impl CorridorScan {
    pub fn within_limits(&self) -> bool {
        self.max_gap <= MAX_GAP && self.max_step_up <= MAX_STEP_UP
    }
}

/// Static walkability scan over ground columns (crates ignored).
pub fn scan_corridor(level: &PlatformerLevel) -> CorridorScan {
    let grid = &level.grid;
    let ground_top = |x: i32| {
        (0..grid.height())
            .rev()
            .find(|&y| grid.get(x, y) == TileKind::Ground)
            .map(|y| y + 1)
    };
    let mut scan = CorridorScan {
        max_gap: 0,
        max_step_up: 0,
    };
    let (from, to) = (level.agent_spawn.x, level.coins.iter().map(|c| c.x).max().unwrap_or(0));
    let mut prev = ground_top(from);
    let mut gap = 0;
    for x in from + 1..=to {
        match ground_top(x) {
            None => {
                gap += 1;
                scan.max_gap = scan.max_gap.max(gap);
            }
            Some(top) => {
                if let Some(p) = prev {
                    scan.max_step_up = scan.max_step_up.max(top - p);
                }
                prev = Some(top);
                gap = 0;
            }
        }
    }
    scan
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(generate_coinrun(LevelSeed(42)), generate_coinrun(LevelSeed(42)));
        assert_ne!(generate_coinrun(LevelSeed(42)), generate_coinrun(LevelSeed(43)));
    }

    #[test]
    fn difficulty_matches_generator() {
        for s in 0..500 {
            let seed = LevelSeed(s);
            let d = sample_difficulty(seed);
            assert!((1..=3).contains(&d));
            assert_eq!(generate_coinrun(seed).difficulty(), Some(d));
        }
    }

    #[test]
    fn difficulty_is_uniform() {
        let n = 30_000u32;
        let mut counts = [0u32; 3];
        for s in 0..n {
            counts[sample_difficulty(LevelSeed(s.wrapping_mul(2_654_435_761))) as usize - 1] += 1;
        }
        let expected = f64::from(n) / 3.0;
        let mut chi2 = 0.0;
        for c in counts {
            let f = f64::from(c) / f64::from(n);
            assert!((f - 1.0 / 3.0).abs() <= 0.01, "{counts:?}");
            chi2 += (f64::from(c) - expected).powi(2) / expected;
        }
        // 2 dof, p = 0.001
        assert!(chi2 < 13.816, "chi2 {chi2}");
    }

    #[test]
    fn single_coin_right_of_spawn() {
        for s in 0..1000 {
            let level = generate_coinrun(LevelSeed(s));
            assert_eq!(level.coins.len(), 1);
            assert_eq!(level.grid.count(TileKind::Coin), 1);
            assert!(level.agent_spawn.x < level.coins[0].x);
            assert_eq!(level.grid.get(level.agent_spawn.x, level.agent_spawn.y), TileKind::Empty);
            assert_eq!(level.grid.get(level.agent_spawn.x, level.agent_spawn.y - 1), TileKind::Ground);
        }
    }

    #[test]
    fn corridor_within_physics_limits() {
        for s in 0..1000u32 {
            let level = generate_coinrun(LevelSeed(s.wrapping_mul(7919)));
            let scan = scan_corridor(&level);
            assert!(scan.within_limits(), "seed {s}: {scan:?}");
        }
    }

    #[test]
    fn monsters_patrol_free_ground() {
        for s in 0..2000 {
            let level = generate_coinrun(LevelSeed(s));
            let d = level.difficulty().unwrap() as usize;
            assert!(level.monsters.len() <= d);
            for m in &level.monsters {
                assert_eq!(m.patrol_start.y, m.patrol_end.y);
                assert!(m.patrol_end.x - m.patrol_start.x >= 3);
                assert!(m.speed > 0.0);
                assert!((0.0..1.0).contains(&m.initial_phase));
                for x in m.patrol_start.x..=m.patrol_end.x {
                    assert_eq!(level.grid.get(x, m.patrol_start.y), TileKind::Empty);
                    assert_eq!(level.grid.get(x, m.patrol_start.y - 1), TileKind::Ground);
                }
            }
        }
    }

    #[test]
    fn obstacles_grow_with_difficulty() {
        let mut sums = [0usize; 3];
        let mut counts = [0usize; 3];
        for s in 0..10_000u32 {
            let level = generate_coinrun(LevelSeed(s));
            let d = level.difficulty().unwrap() as usize - 1;
            sums[d] += level.obstacle_count();
            counts[d] += 1;
        }
        let means: Vec<f64> = (0..3).map(|i| sums[i] as f64 / counts[i] as f64).collect();
        assert!(means[0] < means[1] && means[1] < means[2], "{means:?}");
    }
}
