use thiserror::Error;

/// Errors raised by state construction, channel assembly and machine runs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("occupation {counts:?} is invalid for {n_modes} modes with cutoff {cutoff}")]
    InvalidOccupation {
        counts: Vec<usize>,
        n_modes: usize,
        cutoff: usize,
    },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("mode {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("modes {0:?} must be distinct")]
    ModeCollision(Vec<usize>),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("parameter {name} must be non-negative, got {value}")]
    NegativeParameter { name: &'static str, value: f64 },
    #[error("intensity must be positive, got {0}")]
    NonPositiveIntensity(f64),
    #[error("Monte-Carlo estimation needs at least one sample")]
    ZeroSamples,
    #[error("post-selection accepted zero probability mass")]
    ZeroAcceptance,
    #[error("partial trace needs a non-empty set of modes to keep")]
    EmptyKeepSet,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),
    #[error("invalid loss placement tag `{0}`")]
    InvalidPlacement(String),
    #[error("degenerate fitting grid: {0}")]
    DegenerateGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
