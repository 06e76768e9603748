//! Platformer constants, in tiles and steps.
//!
//! The generator relies on two inequalities against these values: the jump
//! apex `JUMP_VY^2 / (2 * GRAVITY)` must exceed [`MAX_STEP_UP`], and the
//! airborne range `(2 * JUMP_VY / GRAVITY) * MAX_VX` must exceed [`MAX_GAP`].
//! Vertical motion integrates with the mean of the old and new velocity, so
//! both quantities hold exactly at step boundaries, not only in the
//! continuous limit.

pub const GRAVITY: f64 = 0.2;
pub const JUMP_VY: f64 = 1.0;
pub const RUN_ACCEL: f64 = 0.1;
pub const MAX_VX: f64 = 0.5;
pub const FRICTION: f64 = 0.05;
pub const AGENT_HALF: f64 = 0.45;
pub const MAX_GAP: i32 = 4;
pub const MAX_STEP_UP: i32 = 2;

/// Half extent of a monster's square hitbox.
pub const MONSTER_HALF: f64 = 0.4;
/// Saw hitboxes are the tile inset by this margin on every side.
pub const SAW_INSET: f64 = 0.1;

pub const COIN_REWARD: f32 = 10.0;
pub const PLATFORMS_COIN_REWARD: f32 = 1.0;
pub const PLATFORMS_CLEAR_BONUS: f32 = 9.0;
pub const PLATFORMER_STEP_LIMIT: u32 = 1000;

/// Apex of a jump from rest on the ground.
pub fn jump_apex() -> f64 {
    JUMP_VY * JUMP_VY / (2.0 * GRAVITY)
}

/// Horizontal distance covered during one full jump at top speed.
pub fn jump_range() -> f64 {
    (2.0 * JUMP_VY / GRAVITY) * MAX_VX
}
