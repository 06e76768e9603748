//! Integer rasterization of environment states into 64x64 RGB observations.
//!
//! Platformer frames show a 16x16-tile window (4 px per tile) centred on the
//! agent and clamped to the level. Continuous positions are converted to
//! whole pixels once, with `floor(v * 4)`; everything after that is integer
//! arithmetic, so frames are byte-identical on every platform.
//!
//! Maze frames show the 9x9 cell patch around the agent at 7 px per cell
//! (63x63), with the last pixel row and column repeated to fill 64x64.

use std::path::Path;

use crate::error::{Error, Result};
use crate::levelgen::{CellKind, MazeLevel, PlatformerLevel, TileKind};
use crate::sim::maze::MazeState;
use crate::sim::physics::{JUMP_VY, MAX_VX};
use crate::sim::platformer::{monster_center, PlatformerState};

pub const OBS_WIDTH: usize = 64;
pub const OBS_HEIGHT: usize = 64;
pub const OBS_CHANNELS: usize = 3;
pub const OBS_BYTES: usize = OBS_WIDTH * OBS_HEIGHT * OBS_CHANNELS;

const TILE_PX: i32 = 4;
const VIEW_PX: i32 = 64;
const SPRITE_HALF_PX: i32 = 2;
const MAZE_CELL_PX: usize = 7;
const MAZE_PATCH: i32 = 9;

/// Velocity squares: pixel rows 2..=5, columns 2..=5 (x) and 8..=11 (y).
pub const VELOCITY_ROWS: std::ops::RangeInclusive<usize> = 2..=5;
pub const VX_COLS: std::ops::RangeInclusive<usize> = 2..=5;
pub const VY_COLS: std::ops::RangeInclusive<usize> = 8..=11;
/// Painted vertical velocity is clamped to this magnitude.
pub const VY_PAINT_MAX: f64 = 2.0 * JUMP_VY;

pub type Rgb = [u8; 3];

/// A 64x64x3 byte image, row-major, channels R, G, B.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Observation {
    data: Box<[u8]>,
}

impl std::fmt::Debug for Observation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Observation({}x{}x{})", OBS_HEIGHT, OBS_WIDTH, OBS_CHANNELS)
    }
}

impl Default for Observation {
    fn default() -> Self {
        Observation {
            data: vec![0; OBS_BYTES].into_boxed_slice(),
        }
    }
}

impl Observation {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != OBS_BYTES {
            return Err(Error::Ppm(format!("expected {OBS_BYTES} bytes, got {}", bytes.len())));
        }
        Ok(Observation {
            data: bytes.to_vec().into_boxed_slice(),
        })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn as_mut_bytes(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn pixel(&self, row: usize, col: usize) -> Rgb {
        let i = (row * OBS_WIDTH + col) * OBS_CHANNELS;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set_pixel(&mut self, row: usize, col: usize, rgb: Rgb) {
        put(&mut self.data, row, col, rgb);
    }
}

#[inline]
fn put(buf: &mut [u8], row: usize, col: usize, rgb: Rgb) {
    let i = (row * OBS_WIDTH + col) * OBS_CHANNELS;
    buf[i..i + 3].copy_from_slice(&rgb);
}

/// Fixed colors. Every tile kind, the agent and monsters differ from each
/// other and from any background hue by at least 30 in some channel.
pub struct Palette;

impl Palette {
    pub const GROUND: Rgb = [120, 72, 30];
    pub const WALL: Rgb = [60, 60, 70];
    pub const SAW: Rgb = [250, 250, 250];
    pub const LAVA: Rgb = [255, 80, 0];
    pub const COIN: Rgb = [255, 215, 0];
    pub const CRATE: Rgb = [170, 110, 40];
    pub const AGENT: Rgb = [40, 90, 255];
    pub const MONSTER: Rgb = [200, 0, 200];

    pub const MAZE_WALL: Rgb = [40, 40, 40];
    pub const MAZE_EMPTY: Rgb = [160, 220, 160];
    pub const MAZE_GOAL: Rgb = [220, 60, 60];
    pub const MAZE_AGENT: Rgb = [60, 60, 220];

    const BG_SATURATION: u32 = 77;
    const BG_VALUE: u32 = 190;

    /// Background for a level hue, integer HSV at fixed saturation and value.
    pub fn background(hue: u16) -> Rgb {
        let h = u32::from(hue % 360);
        let (s, v) = (Self::BG_SATURATION, Self::BG_VALUE);
        let rem = (h % 60) * 255 / 60;
        let p = (v * (255 - s) / 255) as u8;
        let q = (v * (255 - s * rem / 255) / 255) as u8;
        let t = (v * (255 - s * (255 - rem) / 255) / 255) as u8;
        let v = v as u8;
        match h / 60 {
            0 => [v, t, p],
            1 => [q, v, p],
            2 => [p, v, t],
            3 => [p, q, v],
            4 => [t, p, v],
            _ => [v, p, q],
        }
    }

    /// Tile color; `None` for tiles drawn as background.
    pub fn tile(kind: TileKind) -> Option<Rgb> {
        match kind {
            TileKind::Empty => None,
            TileKind::Ground => Some(Self::GROUND),
            TileKind::Wall => Some(Self::WALL),
            TileKind::Saw => Some(Self::SAW),
            TileKind::Lava => Some(Self::LAVA),
            TileKind::Coin => Some(Self::COIN),
            TileKind::Crate => Some(Self::CRATE),
        }
    }

    pub fn cell(kind: CellKind) -> Rgb {
        match kind {
            CellKind::Wall => Self::MAZE_WALL,
            CellKind::Empty => Self::MAZE_EMPTY,
            CellKind::Goal => Self::MAZE_GOAL,
        }
    }
}

/// Gray level for `v` in `[-max, max]`, round half up.
pub fn velocity_gray(v: f64, max: f64) -> u8 {
    let v = v.clamp(-max, max);
    let g = (255.0 * (v + max) / (2.0 * max) + 0.5).floor();
    g.clamp(0.0, 255.0) as u8
}

/// Inverse of [`velocity_gray`], exact to one quantization step.
pub fn decode_velocity(gray: u8, max: f64) -> f64 {
    f64::from(gray) / 255.0 * 2.0 * max - max
}

/// Lower-left pixel of the view window along one axis.
fn window_origin(center_px: i32, level_px: i32) -> i32 {
    if level_px <= VIEW_PX {
        (level_px - VIEW_PX) / 2
    } else {
        (center_px - VIEW_PX / 2).clamp(0, level_px - VIEW_PX)
    }
}

#[inline]
fn to_px(v: f64) -> i32 {
    (v * f64::from(TILE_PX)).floor() as i32
}

/// Render into a caller-provided 64x64x3 buffer.
pub fn render_platformer_into(
    level: &PlatformerLevel,
    state: &PlatformerState,
    paint_velocity: bool,
    out: &mut [u8],
) {
    assert_eq!(out.len(), OBS_BYTES);
    let grid = &level.grid;
    let (ax, ay) = (to_px(state.x), to_px(state.y));
    let left = window_origin(ax, grid.width() * TILE_PX);
    let bottom = window_origin(ay, grid.height() * TILE_PX);
    let background = Palette::background(level.palette_hue);

    let coin_live = |tx: i32, ty: i32| {
        level
            .coins
            .iter()
            .enumerate()
            .any(|(i, c)| c.x == tx && c.y == ty && state.coins_remaining & (1 << i) != 0)
    };

    let mut row_colors = [background; VIEW_PX as usize / TILE_PX as usize + 2];
    for r in 0..OBS_HEIGHT {
        let wy = bottom + (VIEW_PX - 1) - r as i32;
        let ty = wy.div_euclid(TILE_PX);
        // one color per tile column intersecting the window
        let tx0 = left.div_euclid(TILE_PX);
        for (k, slot) in row_colors.iter_mut().enumerate() {
            let tx = tx0 + k as i32;
            let kind = grid.get(tx, ty);
            *slot = match kind {
                TileKind::Coin if !coin_live(tx, ty) => background,
                k => Palette::tile(k).unwrap_or(background),
            };
        }
        for c in 0..OBS_WIDTH {
            let wx = left + c as i32;
            let k = (wx.div_euclid(TILE_PX) - tx0) as usize;
            put(out, r, c, row_colors[k]);
        }
    }

    let mut sprite = |cx: i32, cy: i32, rgb: Rgb| {
        for wy in cy - SPRITE_HALF_PX..cy + SPRITE_HALF_PX {
            let r = bottom + (VIEW_PX - 1) - wy;
            if !(0..VIEW_PX).contains(&r) {
                continue;
            }
            for wx in cx - SPRITE_HALF_PX..cx + SPRITE_HALF_PX {
                let c = wx - left;
                if (0..VIEW_PX).contains(&c) {
                    put(out, r as usize, c as usize, rgb);
                }
            }
        }
    };
    for m in &level.monsters {
        let (mx, my) = monster_center(m, state.monster_phase(m));
        sprite(to_px(mx), to_px(my), Palette::MONSTER);
    }
    sprite(ax, ay, Palette::AGENT);

    if paint_velocity {
        let gx = velocity_gray(state.vx, MAX_VX);
        let gy = velocity_gray(state.vy, VY_PAINT_MAX);
        for r in VELOCITY_ROWS {
            for c in VX_COLS {
                put(out, r, c, [gx; 3]);
            }
            for c in VY_COLS {
                put(out, r, c, [gy; 3]);
            }
        }
    }
}

pub fn render_platformer(level: &PlatformerLevel, state: &PlatformerState, paint_velocity: bool) -> Observation {
    let mut obs = Observation::default();
    render_platformer_into(level, state, paint_velocity, obs.as_mut_bytes());
    obs
}

pub fn render_maze_into(level: &MazeLevel, state: &MazeState, out: &mut [u8]) {
    assert_eq!(out.len(), OBS_BYTES);
    let half = MAZE_PATCH / 2;
    let mut patch = [[Palette::MAZE_WALL; MAZE_PATCH as usize]; MAZE_PATCH as usize];
    for (dr, row) in patch.iter_mut().enumerate() {
        for (dc, slot) in row.iter_mut().enumerate() {
            let (x, y) = (state.agent.x + dc as i32 - half, state.agent.y + dr as i32 - half);
            *slot = Palette::cell(level.cell(x, y));
        }
    }
    patch[half as usize][half as usize] = Palette::MAZE_AGENT;
    let last = MAZE_CELL_PX * MAZE_PATCH as usize - 1;
    for r in 0..OBS_HEIGHT {
        let pr = r.min(last) / MAZE_CELL_PX;
        for c in 0..OBS_WIDTH {
            let pc = c.min(last) / MAZE_CELL_PX;
            put(out, r, c, patch[pr][pc]);
        }
    }
}

pub fn render_maze(level: &MazeLevel, state: &MazeState) -> Observation {
    let mut obs = Observation::default();
    render_maze_into(level, state, obs.as_mut_bytes());
    obs
}

const PPM_HEADER: &[u8] = b"P6\n64 64\n255\n";

/// Binary PPM: the 13-byte header `P6\n64 64\n255\n` followed by the pixels.
pub fn encode_ppm(obs: &Observation) -> Vec<u8> {
    let mut out = Vec::with_capacity(PPM_HEADER.len() + OBS_BYTES);
    out.extend_from_slice(PPM_HEADER);
    out.extend_from_slice(obs.as_bytes());
    out
}

pub fn decode_ppm(bytes: &[u8]) -> Result<Observation> {
    let body = bytes
        .strip_prefix(PPM_HEADER)
        .ok_or_else(|| Error::Ppm("expected a 64x64 P6 header with maxval 255".into()))?;
    Observation::from_bytes(body)
}

pub fn write_ppm(obs: &Observation, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_ppm(obs)).map_err(|e| Error::file(path, e))
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<Observation> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::file(path, e))?;
    decode_ppm(&bytes)
}
