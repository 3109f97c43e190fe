use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DgoError {
    #[error("bit string must contain at least one bit")]
    EmptyBitString,

    #[error("bit string has length {actual}, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("point has {actual} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid bounds for dimension {dim}: lo = {lo}, hi = {hi}")]
    InvalidBounds { dim: usize, lo: f64, hi: f64 },

    #[error("bits per variable must be in 1..={max}, got {bits}")]
    InvalidResolution { bits: u32, max: u32 },

    #[error("requantize needs a finer target grid (from {from} to {to} bits)")]
    NotFiner { from: u32, to: u32 },

    #[error("quantizers disagree on dimensions or bounds")]
    IncompatibleQuantizers,

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error("expected {expected} child values, got {actual}")]
    ChildCountMismatch { expected: usize, actual: usize },

    #[error("resolution is already at its maximum of {0} bits")]
    AtMaxResolution(u32),

    #[error("worker count must be at least 1")]
    ZeroWorkers,

    #[error("cannot reduce an empty value sequence")]
    EmptyReduction,

    #[error("{0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, DgoError>;
