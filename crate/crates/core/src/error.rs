use thiserror::Error;

/// Errors raised by grid construction, solvers and estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operation needs a periodic grid")]
    NotPeriodic,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("block index {j} outside 0..={jmax}")]
    BlockOutOfRange { j: usize, jmax: usize },

    #[error("velocity grid [{v_min}, {v_max}] does not cover values in [{lo}, {hi}]")]
    VelocityCoverage {
        v_min: f64,
        v_max: f64,
        lo: f64,
        hi: f64,
    },

    #[error("blow-up at t = {time:.6e} (step {step}): max|u| = {max_abs:.6e} exceeds cap {cap:.6e}")]
    BlowUp {
        time: f64,
        step: usize,
        max_abs: f64,
        cap: f64,
    },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),

    #[error("malformed snapshot: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
