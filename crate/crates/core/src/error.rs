use thiserror::Error;

/// Errors raised anywhere in the discovery and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series has a gap of {len} consecutive missing values starting at index {start}")]
    GapTooLong { start: usize, len: usize },

    #[error("series ends with a missing value")]
    TrailingGap,

    #[error("series is constant (standard deviation is zero)")]
    ConstantSeries,

    #[error("covariance matrix is not positive definite after jitter {jitter:e}")]
    NotPositiveDefinite { jitter: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("herd threshold undefined: a3 = 0")]
    ZeroHerdCoefficient,

    #[error("point is not an equilibrium (residual {residual:e})")]
    NotAnEquilibrium { residual: f64 },

    #[error("no seed equilibrium available for continuation")]
    NoSeed,

    #[error("Newton corrector diverged: {0}")]
    Divergence(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
