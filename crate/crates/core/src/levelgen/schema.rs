//! Level JSON documents.
//!
//! ```json
//! {
//!   "game": "coinrun",            // "coinrun" | "platforms" | "mazes"
//!   "schema_version": 1,
//!   "seed": 42,
//!   "difficulty": 2,              // coinrun only
//!   "width": 40, "height": 20,    // platformer games
//!   "rows": ["W....", ...],       // top row first, one char per tile
//!   "agent_spawn": {"x": 1, "y": 4},
//!   "coins": [{"x": 38, "y": 6}],
//!   "monsters": [{"patrol_start": {...}, "patrol_end": {...},
//!                 "speed": 0.1, "initial_phase": 0.25}],
//!   "palette_hue": 211
//! }
//! ```
//!
//! Maze documents carry `dim`, `rows` (`#` wall, `.` empty, `G` goal) and
//! `agent_start`. Platformer rows are listed from the top of the level down,
//! so `rows[0]` is `y = height - 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levelgen::{
    CellKind, Level, MazeLevel, MonsterSpec, PlatformerLevel, PlatformerVariant, TileGrid, TileKind, TilePos,
};
use crate::rng::LevelSeed;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
#[serde(tag = "game", rename_all = "lowercase")]
enum LevelDoc {
    Coinrun(PlatformerDoc),
    Platforms(PlatformerDoc),
    Mazes(MazeDoc),
}

#[derive(Serialize, Deserialize)]
struct PlatformerDoc {
    schema_version: u32,
    seed: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    difficulty: Option<u8>,
    width: i32,
    height: i32,
    rows: Vec<String>,
    agent_spawn: TilePos,
    coins: Vec<TilePos>,
    monsters: Vec<MonsterSpec>,
    palette_hue: u16,
}

#[derive(Serialize, Deserialize)]
struct MazeDoc {
    schema_version: u32,
    seed: u32,
    dim: i32,
    rows: Vec<String>,
    agent_start: TilePos,
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

pub fn serialize_level(level: &Level) -> String {
    let doc = match level {
        Level::Platformer(l) => {
            let grid = &l.grid;
            let rows = (0..grid.height())
                .rev()
                .map(|y| (0..grid.width()).map(|x| grid.get(x, y).symbol()).collect())
                .collect();
            let doc = PlatformerDoc {
                schema_version: SCHEMA_VERSION,
                seed: l.seed.0,
                difficulty: l.difficulty(),
                width: grid.width(),
                height: grid.height(),
                rows,
                agent_spawn: l.agent_spawn,
                coins: l.coins.clone(),
                monsters: l.monsters.clone(),
                palette_hue: l.palette_hue,
            };
            match l.variant {
                PlatformerVariant::CoinRun { .. } => LevelDoc::Coinrun(doc),
                PlatformerVariant::Platforms => LevelDoc::Platforms(doc),
            }
        }
        Level::Maze(m) => LevelDoc::Mazes(MazeDoc {
            schema_version: SCHEMA_VERSION,
            seed: m.seed.0,
            dim: m.dim,
            rows: m
                .cells
                .chunks(m.dim as usize)
                .map(|row| row.iter().map(|c| c.symbol()).collect())
                .collect(),
            agent_start: m.agent_start,
        }),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("level documents always serialize");
    out.push('\n');
    out
}

pub fn deserialize_level(text: &str) -> Result<Level> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| invalid("", e.to_string()))?;
    let game = value
        .get("game")
        .and_then(|g| g.as_str())
        .ok_or_else(|| invalid("game", "missing or not a string"))?
        .to_owned();
    match game.as_str() {
        "coinrun" => {
            let d: PlatformerDoc = from_value(value)?;
            let difficulty = d.difficulty.ok_or_else(|| invalid("difficulty", "missing field"))?;
            if !(1..=3).contains(&difficulty) {
                return Err(invalid("difficulty", format!("{difficulty} outside 1..=3")));
            }
            platformer_from_doc(d, PlatformerVariant::CoinRun { difficulty })
        }
        "platforms" => platformer_from_doc(from_value(value)?, PlatformerVariant::Platforms),
        "mazes" => maze_from_doc(from_value(value)?),
        other => Err(invalid("game", format!("unknown game {other:?}"))),
    }
}

// Going through a concrete struct keeps the field path of the first error.
fn from_value<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        invalid(path, e.into_inner().to_string())
    })
}

fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        return Err(invalid("schema_version", format!("unsupported version {v}")));
    }
    Ok(())
}

fn platformer_from_doc(d: PlatformerDoc, variant: PlatformerVariant) -> Result<Level> {
    check_version(d.schema_version)?;
    if d.width <= 0 || d.height <= 0 {
        return Err(invalid("width", "dimensions must be positive"));
    }
    if d.rows.len() != d.height as usize {
        return Err(invalid("rows", format!("expected {} rows, found {}", d.height, d.rows.len())));
    }
    let mut cells = vec![TileKind::Empty; (d.width * d.height) as usize];
    for (r, row) in d.rows.iter().enumerate() {
        let y = d.height - 1 - r as i32;
        let chars: Vec<char> = row.chars().collect();
        if chars.len() != d.width as usize {
            return Err(invalid(format!("rows[{r}]"), format!("expected {} tiles, found {}", d.width, chars.len())));
        }
        for (x, c) in chars.into_iter().enumerate() {
            let kind = TileKind::from_symbol(c)
                .ok_or_else(|| invalid(format!("rows[{r}][{x}]"), format!("unknown tile symbol {c:?}")))?;
            cells[(y * d.width) as usize + x] = kind;
        }
    }
    let grid = TileGrid::from_cells(d.width, d.height, cells);
    if !grid.in_bounds(d.agent_spawn.x, d.agent_spawn.y) {
        return Err(invalid("agent_spawn", "outside the grid"));
    }
    for (i, c) in d.coins.iter().enumerate() {
        if grid.get(c.x, c.y) != TileKind::Coin || !grid.in_bounds(c.x, c.y) {
            return Err(invalid(format!("coins[{i}]"), "does not name a coin tile"));
        }
    }
    if grid.count(TileKind::Coin) != d.coins.len() {
        return Err(invalid("coins", "coin list disagrees with the grid"));
    }
    if d.coins.len() > 32 {
        return Err(invalid("coins", "at most 32 coins are supported"));
    }
    for (i, m) in d.monsters.iter().enumerate() {
        if m.patrol_start.y != m.patrol_end.y || m.patrol_start.x > m.patrol_end.x {
            return Err(invalid(format!("monsters[{i}]"), "patrol must run left to right on one row"));
        }
        if m.speed.is_nan() || m.speed <= 0.0 || !(0.0..1.0).contains(&m.initial_phase) {
            return Err(invalid(format!("monsters[{i}]"), "speed must be positive and phase in [0, 1)"));
        }
    }
    if d.palette_hue >= 360 {
        return Err(invalid("palette_hue", "must be below 360"));
    }
    Ok(Level::Platformer(PlatformerLevel {
        seed: LevelSeed(d.seed),
        variant,
        grid,
        agent_spawn: d.agent_spawn,
        coins: d.coins,
        monsters: d.monsters,
        palette_hue: d.palette_hue,
    }))
}

fn maze_from_doc(d: MazeDoc) -> Result<Level> {
    check_version(d.schema_version)?;
    if d.dim <= 0 {
        return Err(invalid("dim", "must be positive"));
    }
    if d.rows.len() != d.dim as usize {
        return Err(invalid("rows", format!("expected {} rows, found {}", d.dim, d.rows.len())));
    }
    let mut cells = Vec::with_capacity((d.dim * d.dim) as usize);
    for (r, row) in d.rows.iter().enumerate() {
        let before = cells.len();
        for (x, c) in row.chars().enumerate() {
            let kind = CellKind::from_symbol(c)
                .ok_or_else(|| invalid(format!("rows[{r}][{x}]"), format!("unknown cell symbol {c:?}")))?;
            cells.push(kind);
        }
        if cells.len() - before != d.dim as usize {
            return Err(invalid(format!("rows[{r}]"), format!("expected {} cells", d.dim)));
        }
    }
    if cells.iter().filter(|&&c| c == CellKind::Goal).count() != 1 {
        return Err(invalid("rows", "exactly one goal cell required"));
    }
    let maze = MazeLevel {
        seed: LevelSeed(d.seed),
        dim: d.dim,
        cells,
        agent_start: d.agent_start,
    };
    if maze.cell(d.agent_start.x, d.agent_start.y) != CellKind::Empty {
        return Err(invalid("agent_start", "must be an empty corridor cell"));
    }
    Ok(Level::Maze(maze))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Game;

    #[test]
    fn regeneration_equals_deserialization() {
        for game in Game::ALL {
            let level = Level::generate(game, LevelSeed(7));
            let text = serialize_level(&level);
            assert_eq!(deserialize_level(&text).unwrap(), level);
            assert_eq!(serialize_level(&deserialize_level(&text).unwrap()), text);
        }
    }

    #[test]
    fn round_trip_many_levels() {
        for s in 0..100u32 {
            for game in Game::ALL {
                let level = Level::generate(game, LevelSeed(s.wrapping_mul(104_729)));
                assert_eq!(deserialize_level(&serialize_level(&level)).unwrap(), level);
            }
        }
    }

    #[test]
    fn truncated_document_is_an_error() {
        let text = serialize_level(&Level::generate(Game::CoinRun, LevelSeed(3)));
        for cut in [0, 1, 10, text.len() / 2, text.len() - 3] {
            assert!(matches!(deserialize_level(&text[..cut]), Err(Error::Parse { .. })));
        }
    }

    #[test]
    fn errors_carry_field_paths() {
        let text = serialize_level(&Level::generate(Game::CoinRun, LevelSeed(3)));
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["agent_spawn"]["x"] = serde_json::json!("left");
        match deserialize_level(&v.to_string()) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "agent_spawn.x"),
            other => panic!("{other:?}"),
        }

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let row = v["rows"][2].as_str().unwrap().replacen('.', "?", 1);
        v["rows"][2] = serde_json::json!(row);
        match deserialize_level(&v.to_string()) {
            Err(Error::Parse { path, .. }) => assert!(path.starts_with("rows[2]["), "{path}"),
            other => panic!("{other:?}"),
        }

        let maze = serialize_level(&Level::generate(Game::Mazes, LevelSeed(3)));
        let mut v: serde_json::Value = serde_json::from_str(&maze).unwrap();
        v["rows"].as_array_mut().unwrap().pop();
        assert!(matches!(deserialize_level(&v.to_string()), Err(Error::Parse { path, .. }) if path == "rows"));
    }
}
