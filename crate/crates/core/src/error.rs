use thiserror::Error;

use crate::integrator::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("field is not real-flagged; use complex synthesis")]
    NotReal,

    #[error("integer overflow in resonance arithmetic for {0:?}")]
    Overflow(Vec<i64>),

    #[error("frequency {value} exceeds cap {cap}")]
    OutOfRange { value: i64, cap: i64 },

    #[error("frequencies sum to {got}, expected output frequency {expected}")]
    SumMismatch { expected: i64, got: i64 },

    #[error("direct enumeration requires M <= {cap}, got M = {got}")]
    SizeCap { cap: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value at t = {time} (step {step})")]
    NonFinite { time: f64, step: usize },

    #[error("blow-up at t = {time}: H^2 norm {norm:.3e} exceeds {threshold:.3e}")]
    BlowUp {
        time: f64,
        norm: f64,
        threshold: f64,
        partial: Box<Trajectory>,
    },

    #[error("trajectory has no phase accumulator")]
    MissingPhase,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
