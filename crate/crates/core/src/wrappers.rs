//! Training-time wrappers: cutout augmentation, epsilon-greedy action
//! override and frame stacking.
//!
//! The evaluation harness never applies cutout or epsilon-greedy.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::render::{Observation, OBS_BYTES, OBS_CHANNELS, OBS_HEIGHT, OBS_WIDTH};
use crate::rng::Rng;

pub const MAX_CUTOUT_RECTS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CutoutConfig {
    pub enabled: bool,
    pub n_rects_max: u32,
    pub rect_w_max: u32,
    pub rect_h_max: u32,
}

impl Default for CutoutConfig {
    fn default() -> Self {
        CutoutConfig {
            enabled: true,
            n_rects_max: 5,
            rect_w_max: 16,
            rect_h_max: 16,
        }
    }
}

impl CutoutConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_CUTOUT_RECTS).contains(&self.n_rects_max) {
            return Err(Error::Config(format!(
                "cutout n_rects_max must be in 1..={MAX_CUTOUT_RECTS}, got {}",
                self.n_rects_max
            )));
        }
        for (name, v, limit) in [("rect_w_max", self.rect_w_max, OBS_WIDTH), ("rect_h_max", self.rect_h_max, OBS_HEIGHT)] {
            if v == 0 || v as usize > limit {
                return Err(Error::Config(format!("cutout {name} must be in 1..={limit}, got {v}")));
            }
        }
        Ok(())
    }
}

/// A filled rectangle, already clipped to the image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        (self.y..self.y + self.h).contains(&row) && (self.x..self.x + self.w).contains(&col)
    }
}

pub fn fill_rect(obs: &mut [u8], rect: Rect, rgb: [u8; 3]) {
    for r in rect.y..rect.y + rect.h {
        let row = &mut obs[(r * OBS_WIDTH + rect.x) * OBS_CHANNELS..(r * OBS_WIDTH + rect.x + rect.w) * OBS_CHANNELS];
        for px in row.chunks_exact_mut(OBS_CHANNELS) {
            px.copy_from_slice(&rgb);
        }
    }
}

/// Mask 1..=n_rects_max random rectangles with random solid colors.
///
/// Per rectangle the draws are: left, top, width, height, then R, G, B.
/// Returns the rectangles in the order they were painted.
pub fn apply_cutout(config: &CutoutConfig, obs: &mut [u8], rng: &mut Rng) -> Vec<Rect> {
    assert_eq!(obs.len(), OBS_BYTES);
    let n = rng.range(1, i64::from(config.n_rects_max));
    (0..n)
        .map(|_| {
            let x = rng.index(OBS_WIDTH);
            let y = rng.index(OBS_HEIGHT);
            let w = rng.range(1, i64::from(config.rect_w_max)) as usize;
            let h = rng.range(1, i64::from(config.rect_h_max)) as usize;
            let rgb = [rng.range(0, 255) as u8, rng.range(0, 255) as u8, rng.range(0, 255) as u8];
            let rect = Rect {
                x,
                y,
                w: w.min(OBS_WIDTH - x),
                h: h.min(OBS_HEIGHT - y),
            };
            fill_rect(obs, rect, rgb);
            rect
        })
        .collect()
}

/// Expected fraction of pixels covered by at least one cutout rectangle.
///
/// Along one axis of length `L` with start uniform on `0..L` and extent
/// uniform on `1..=M`, coordinate `c` is covered with probability
/// `sum_{m=1..M} min(m, c + 1) / (L * M)`. Axes are independent, and so are
/// the rectangles given their count `n`, uniform on `1..=N`.
pub fn expected_masked_fraction(config: &CutoutConfig) -> f64 {
    let axis = |len: usize, max: u32| -> Vec<f64> {
        (0..len)
            .map(|c| {
                let hits: usize = (1..=max as usize).map(|m| m.min(c + 1)).sum();
                hits as f64 / (len as f64 * f64::from(max))
            })
            .collect()
    };
    let px = axis(OBS_WIDTH, config.rect_w_max);
    let py = axis(OBS_HEIGHT, config.rect_h_max);
    let n_max = config.n_rects_max;
    let mut total = 0.0;
    for &a in &py {
        for &b in &px {
            let miss = 1.0 - a * b;
            let mean_cover: f64 = (1..=n_max).map(|n| 1.0 - miss.powi(n as i32)).sum::<f64>() / f64::from(n_max);
            total += mean_cover;
        }
    }
    total / (OBS_WIDTH * OBS_HEIGHT) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonGreedyConfig {
    pub epsilon: f64,
}

impl EpsilonGreedyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidProbability(self.epsilon));
        }
        Ok(())
    }
}

/// With probability epsilon replace `action` by a uniform one.
///
/// `overridden` is true whenever the coin flip fires, even if the random
/// action equals the original.
pub fn apply_epsilon_greedy(action: u32, action_count: u32, epsilon: f64, rng: &mut Rng) -> Result<(u32, bool)> {
    if action >= action_count {
        return Err(Error::InvalidAction {
            env: 0,
            action,
            n: action_count as usize,
        });
    }
    if rng.bernoulli(epsilon)? {
        Ok((rng.index(action_count as usize) as u32, true))
    } else {
        Ok((action, false))
    }
}

/// The last `k` frames, oldest first. Reset pads by repeating the first frame.
#[derive(Debug, Clone)]
pub struct FrameStack {
    k: usize,
    frames: VecDeque<Observation>,
}

impl FrameStack {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("frame stack depth must be at least 1".into()));
        }
        Ok(FrameStack {
            k,
            frames: VecDeque::with_capacity(k),
        })
    }

    pub fn depth(&self) -> usize {
        self.k
    }

    pub fn reset(&mut self, first: &Observation) -> Vec<u8> {
        self.frames.clear();
        self.frames.extend(std::iter::repeat_n(first.clone(), self.k));
        self.stacked()
    }

    pub fn push(&mut self, obs: &Observation) -> Vec<u8> {
        if self.frames.is_empty() {
            return self.reset(obs);
        }
        if self.frames.len() == self.k {
            self.frames.pop_front();
        }
        self.frames.push_back(obs.clone());
        self.stacked()
    }

    /// `k x 64 x 64 x 3` bytes.
    pub fn stacked(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.k * OBS_BYTES);
        for f in &self.frames {
            out.extend_from_slice(f.as_bytes());
        }
        out
    }
}
