use std::path::PathBuf;

use crate::path::Polyline;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    SpecMismatch { left: String, right: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("weight must be strictly positive, found {value} at node {index}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("source set is empty")]
    EmptySource,

    #[error("point {0:?} lies outside the unit box")]
    OutsideBox([f64; 3]),

    #[error("descent stagnated after {} points", partial.len())]
    Stagnation { partial: Polyline },

    #[error("descent exceeded the step cap of {cap}")]
    StepCap { cap: usize, partial: Polyline },

    #[error("sweep failed for {failed} of {total} samples: {first}")]
    Sweep {
        failed: usize,
        total: usize,
        first: Box<Error>,
    },

    #[error("obstacle violated: u = {value} > 1/4 at node {index}")]
    ObstacleViolation { index: usize, value: f64 },

    #[error("level {level} outside field range [{min}, {max}]")]
    LevelOutOfRange { level: f64, min: f64, max: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("format error in {path:?}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("config error (line {line}): {reason}")]
    Config { line: usize, reason: String },

    #[error("geodesic computation failed at iteration {iteration}: {source}")]
    Geodesic {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than numerical breakdown.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::InvalidParameter { .. }
                | Error::InvalidGrid(_)
                | Error::OutsideBox(_)
                | Error::Format { .. }
                | Error::Geometry(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
