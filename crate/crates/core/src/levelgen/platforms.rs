//! CoinRun-Platforms: a fixed 64x32 canvas with flat ground, floating
//! one-way platforms, scattered coins and patrolling monsters.
//!
//! Each platform is anchored to an existing surface: its top sits exactly
//! [`MAX_STEP_UP`] above the anchor's top and the horizontal gap between them
//! is at most [`ANCHOR_REACH`] tiles, so a chain of anchors connects every
//! platform back to the ground.

use crate::levelgen::{MonsterSpec, PlatformerLevel, PlatformerVariant, TileGrid, TileKind, TilePos};
use crate::rng::{LevelSeed, Rng, StreamTag};
use crate::sim::physics::MAX_STEP_UP;

pub const PLATFORMS_WIDTH: i32 = 64;
pub const PLATFORMS_HEIGHT: i32 = 32;
const GROUND_TOP: i32 = 2;
const ANCHOR_REACH: i32 = 2;
const MIN_MONSTER_PLATFORM: i32 = 4;
const PLACEMENT_RETRIES: usize = 64;
/// Ground monsters keep clear of the spawn area.
const GROUND_PATROL_MIN_X: i32 = 8;

#[derive(Debug, Clone, Copy)]
struct Surface {
    x0: i32,
    x1: i32,
    top: i32,
}

impl Surface {
    fn len(&self) -> i32 {
        self.x1 - self.x0 + 1
    }

    fn horizontal_gap(&self, other: &Surface) -> i32 {
        (other.x0 - self.x1 - 1).max(self.x0 - other.x1 - 1).max(0)
    }
}

pub fn generate_platforms(seed: LevelSeed) -> PlatformerLevel {
    let (w, h) = (PLATFORMS_WIDTH, PLATFORMS_HEIGHT);
    let mut grid = TileGrid::new(w, h);
    for y in 0..h {
        grid.set(0, y, TileKind::Wall);
        grid.set(w - 1, y, TileKind::Wall);
    }
    for x in 1..w - 1 {
        for y in 0..GROUND_TOP {
            grid.set(x, y, TileKind::Ground);
        }
    }
    let ground = Surface {
        x0: 1,
        x1: w - 2,
        top: GROUND_TOP,
    };

    let mut layout = Rng::stream(seed, StreamTag::Layout);
    let n_platforms = layout.range(10, 16);
    let mut surfaces = vec![ground];
    for _ in 0..n_platforms {
        for _ in 0..PLACEMENT_RETRIES {
            let len = layout.range(3, 8) as i32;
            let anchor = surfaces[layout.index(surfaces.len())];
            let top = anchor.top + MAX_STEP_UP;
            let lo = (anchor.x0 - len - ANCHOR_REACH).max(1);
            let hi = (anchor.x1 + ANCHOR_REACH + 1).min(w - 1 - len);
            if lo > hi {
                continue;
            }
            let x0 = layout.range(i64::from(lo), i64::from(hi)) as i32;
            let candidate = Surface {
                x0,
                x1: x0 + len - 1,
                top,
            };
            if top > h - 4 || candidate.horizontal_gap(&anchor) > ANCHOR_REACH {
                continue;
            }
            let crowded = surfaces[1..].iter().any(|s| {
                (s.top - top).abs() <= 1 && s.x0 <= candidate.x1 + 1 && candidate.x0 <= s.x1 + 1
            });
            if crowded {
                continue;
            }
            for x in candidate.x0..=candidate.x1 {
                grid.set(x, top - 1, TileKind::Crate);
            }
            surfaces.push(candidate);
            break;
        }
    }

    let agent_spawn = TilePos::new(1, GROUND_TOP);

    let mut entities = Rng::stream(seed, StreamTag::Entities);
    let coin_count = entities.range(8, 14) as usize;
    let mut spots: Vec<TilePos> = surfaces
        .iter()
        .flat_map(|s| (s.x0..=s.x1).map(move |x| TilePos::new(x, s.top)))
        .filter(|p| grid.get(p.x, p.y) == TileKind::Empty)
        .filter(|p| p.y != agent_spawn.y || (p.x - agent_spawn.x).abs() > 1)
        .collect();
    spots.sort_unstable();
    spots.dedup();
    entities.shuffle(&mut spots);
    let coins: Vec<TilePos> = spots.into_iter().take(coin_count).collect();
    for c in &coins {
        grid.set(c.x, c.y, TileKind::Coin);
    }

    let n_monsters = entities.range(2, 6);
    let patrol_surfaces: Vec<Surface> = std::iter::once(ground)
        .chain(surfaces[1..].iter().copied().filter(|s| s.len() >= MIN_MONSTER_PLATFORM))
        .collect();
    let mut monsters = Vec::with_capacity(n_monsters as usize);
    for _ in 0..n_monsters {
        let s = patrol_surfaces[entities.index(patrol_surfaces.len())];
        let (x0, x1) = if s.top == GROUND_TOP {
            let start = entities.range(i64::from(GROUND_PATROL_MIN_X), i64::from(w - 5)) as i32;
            let span = entities.range(3, 9) as i32;
            (start, (start + span).min(w - 2))
        } else {
            (s.x0, s.x1)
        };
        let speed = entities.range(1, 3) as f64 * 0.05;
        let initial_phase = entities.range(0, 63) as f64 / 64.0;
        monsters.push(MonsterSpec {
            patrol_start: TilePos::new(x0, s.top),
            patrol_end: TilePos::new(x1, s.top),
            speed,
            initial_phase,
        });
    }

    let mut palette = Rng::stream(seed, StreamTag::Palette);
    let palette_hue = palette.range(0, 359) as u16;

    PlatformerLevel {
        seed,
        variant: PlatformerVariant::Platforms,
        grid,
        agent_spawn,
        coins,
        monsters,
        palette_hue,
    }
}
