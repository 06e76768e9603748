//! Seeded level generators and the level data model.
//!
//! Platformer grids use `y = 0` for the bottom row and grow upward; maze grids
//! use `y = 0` for the top row. Both store cells row-major.

mod coinrun;
mod maze;
mod platforms;
mod schema;

pub use coinrun::{generate_coinrun, sample_difficulty, scan_corridor, CorridorScan, COINRUN_HEIGHT};
pub use maze::{generate_maze, CellKind, MazeLevel, MAZE_MAX_DIM, MAZE_MIN_DIM};
pub use platforms::{generate_platforms, PLATFORMS_HEIGHT, PLATFORMS_WIDTH};
pub use schema::{deserialize_level, serialize_level, SCHEMA_VERSION};

use serde::{Deserialize, Serialize};

use crate::rng::LevelSeed;
use crate::Game;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TileKind {
    Empty,
    Ground,
    Wall,
    Saw,
    Lava,
    Coin,
    /// One-way platform: solid only when landed on from above.
    Crate,
}

impl TileKind {
    pub const ALL: [TileKind; 7] = [
        TileKind::Empty,
        TileKind::Ground,
        TileKind::Wall,
        TileKind::Saw,
        TileKind::Lava,
        TileKind::Coin,
        TileKind::Crate,
    ];

    pub fn symbol(self) -> char {
        match self {
            TileKind::Empty => '.',
            TileKind::Ground => '#',
            TileKind::Wall => 'W',
            TileKind::Saw => '^',
            TileKind::Lava => '~',
            TileKind::Coin => '$',
            TileKind::Crate => '=',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        TileKind::ALL.into_iter().find(|k| k.symbol() == c)
    }

    /// Blocks movement from every side.
    #[inline]
    pub fn is_solid(self) -> bool {
        matches!(self, TileKind::Ground | TileKind::Wall)
    }

    #[inline]
    pub fn is_hazard(self) -> bool {
        matches!(self, TileKind::Saw | TileKind::Lava)
    }

    /// Something the agent can stand on.
    #[inline]
    pub fn is_support(self) -> bool {
        matches!(self, TileKind::Ground | TileKind::Wall | TileKind::Crate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TilePos {
    pub x: i32,
    pub y: i32,
}

impl TilePos {
    pub const fn new(x: i32, y: i32) -> Self {
        TilePos { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TileGrid {
    width: i32,
    height: i32,
    cells: Vec<TileKind>,
}

impl TileGrid {
    pub fn new(width: i32, height: i32) -> Self {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        TileGrid {
            width,
            height,
            cells: vec![TileKind::Empty; (width * height) as usize],
        }
    }

    pub(crate) fn from_cells(width: i32, height: i32, cells: Vec<TileKind>) -> Self {
        assert_eq!(cells.len(), (width * height) as usize);
        TileGrid { width, height, cells }
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn cells(&self) -> &[TileKind] {
        &self.cells
    }

    #[inline]
    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && x < self.width && y < self.height
    }

    /// Tile at `(x, y)`. Left and right of the grid read as walls, above and
    /// below read as empty.
    #[inline]
    pub fn get(&self, x: i32, y: i32) -> TileKind {
        if x < 0 || x >= self.width {
            TileKind::Wall
        } else if y < 0 || y >= self.height {
            TileKind::Empty
        } else {
            self.cells[(y * self.width + x) as usize]
        }
    }

    pub fn set(&mut self, x: i32, y: i32, kind: TileKind) {
        assert!(self.in_bounds(x, y), "({x}, {y}) outside {}x{}", self.width, self.height);
        self.cells[(y * self.width + x) as usize] = kind;
    }

    pub fn count(&self, kind: TileKind) -> usize {
        self.cells.iter().filter(|&&k| k == kind).count()
    }

    /// Top of the highest solid-or-crate tile in column `x`, or `None` for a pit.
    pub fn surface_height(&self, x: i32) -> Option<i32> {
        (0..self.height)
            .rev()
            .find(|&y| self.get(x, y).is_support())
            .map(|y| y + 1)
    }
}

/// A monster pacing back and forth along one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonsterSpec {
    pub patrol_start: TilePos,
    pub patrol_end: TilePos,
    /// Tiles per step.
    pub speed: f64,
    /// Fraction of a full back-and-forth cycle, in `[0, 1)`.
    pub initial_phase: f64,
}

impl MonsterSpec {
    pub fn patrol_length(&self) -> f64 {
        f64::from(self.patrol_end.x - self.patrol_start.x)
    }

    /// Phase advance per step.
    pub fn phase_rate(&self) -> f64 {
        let len = self.patrol_length();
        if len <= 0.0 {
            0.0
        } else {
            self.speed / (2.0 * len)
        }
    }

    /// Phase after `steps` steps, in closed form so it never drifts.
    pub fn phase_at(&self, steps: u32) -> f64 {
        let p = self.initial_phase + f64::from(steps) * self.phase_rate();
        p - p.floor()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlatformerVariant {
    CoinRun { difficulty: u8 },
    Platforms,
}

/// A CoinRun or CoinRun-Platforms level.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformerLevel {
    pub seed: LevelSeed,
    pub variant: PlatformerVariant,
    pub grid: TileGrid,
    /// The tile the agent's body starts in.
    pub agent_spawn: TilePos,
    pub coins: Vec<TilePos>,
    pub monsters: Vec<MonsterSpec>,
    /// Background hue in whole degrees, `[0, 360)`.
    pub palette_hue: u16,
}

impl PlatformerLevel {
    pub fn game(&self) -> Game {
        match self.variant {
            PlatformerVariant::CoinRun { .. } => Game::CoinRun,
            PlatformerVariant::Platforms => Game::Platforms,
        }
    }

    pub fn difficulty(&self) -> Option<u8> {
        match self.variant {
            PlatformerVariant::CoinRun { difficulty } => Some(difficulty),
            PlatformerVariant::Platforms => None,
        }
    }

    /// Saws, lava tiles and monsters.
    pub fn obstacle_count(&self) -> usize {
        self.grid.count(TileKind::Saw) + self.grid.count(TileKind::Lava) + self.monsters.len()
    }

    /// Best achievable episode return.
    pub fn max_return(&self) -> f32 {
        use crate::sim::physics::*;
        match self.variant {
            PlatformerVariant::CoinRun { .. } => COIN_REWARD,
            PlatformerVariant::Platforms => {
                self.coins.len() as f32 * PLATFORMS_COIN_REWARD + PLATFORMS_CLEAR_BONUS
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Level {
    Platformer(PlatformerLevel),
    Maze(MazeLevel),
}

impl Level {
    pub fn generate(game: Game, seed: LevelSeed) -> Level {
        match game {
            Game::CoinRun => Level::Platformer(generate_coinrun(seed)),
            Game::Platforms => Level::Platformer(generate_platforms(seed)),
            Game::Mazes => Level::Maze(generate_maze(seed)),
        }
    }

    pub fn seed(&self) -> LevelSeed {
        match self {
            Level::Platformer(l) => l.seed,
            Level::Maze(m) => m.seed,
        }
    }

    pub fn game(&self) -> Game {
        match self {
            Level::Platformer(l) => l.game(),
            Level::Maze(_) => Game::Mazes,
        }
    }
}
