use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SqgError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("non-finite value in input at index {index}")]
    NonFinite { index: usize },

    #[error("fractional inverse of non-mean-free field (zero mode = {zero_mode:e})")]
    NonMeanFree { zero_mode: f64 },

    #[error("solution lost regularity at t = {t}")]
    RegularityLoss { t: f64 },

    #[error("time step underflow at t = {t} (dt = {dt:e})")]
    DtUnderflow { t: f64, dt: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient decay near vertical boundary: boundary mass fraction {fraction:e} exceeds {limit:e}")]
    InsufficientDecay { fraction: f64, limit: f64 },

    #[error("empty annulus on grid for block {j}")]
    EmptyAnnulus { j: i32 },

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("snapshot format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, SqgError>;
