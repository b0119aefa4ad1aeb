use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TrajError {
    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),

    #[error("geographic coordinate out of range at point {index}: lat={lat}, lon={lon}")]
    GeoOutOfRange { index: usize, lat: f64, lon: f64 },

    #[error("distance threshold must be positive, got {0}")]
    InvalidThreshold(f64),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("local alignment requires tau to be set")]
    MissingTau,

    #[error("assignment shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("backtracking failed at cell ({i}, {j}): {reason}")]
    CorruptTables { i: usize, j: usize, reason: &'static str },

    #[error("enumeration guard exceeded: {0} candidate pairs")]
    GuardExceeded(u128),

    #[error("need at least 2 trajectories, got {0}")]
    TooFewTrajectories(usize),

    #[error("pairwise results were produced by {found}, expected {expected}")]
    MethodMismatch { expected: String, found: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: u64, msg: String },

    #[error("{0}: no valid rows")]
    NoRows(PathBuf),
}

pub type Result<T> = std::result::Result<T, TrajError>;
