use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid range: lo {lo} > hi {hi}")]
    InvalidRange { lo: i64, hi: i64 },

    #[error("invalid probability {0}: must lie in [0, 1]")]
    InvalidProbability(f64),

    #[error("episode already finished; reset before stepping")]
    EpisodeFinished,

    #[error("invalid action {action} for env {env}: action space has {n} actions")]
    InvalidAction { env: usize, action: u32, n: usize },

    #[error("cell ({x}, {y}) is not a corridor cell")]
    InvalidCell { x: i32, y: i32 },

    #[error("level parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("infeasible level sets: {train} train + {test} test seeds exceed the 2^32 seed space")]
    Infeasible { train: u64, test: u64 },

    #[error("privileged agent `{0}` cannot appear in a generalization report")]
    PrivilegedAgent(String),

    #[error("agent fault in episode {episode} at step {step}: {source}")]
    Agent {
        episode: usize,
        step: u32,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad PPM data: {0}")]
    Ppm(String),

    #[error("report encoding: {0}")]
    Report(String),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
