use thiserror::Error;

/// Errors raised by validation, allocation and the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,
    #[error("entry {index} is not finite")]
    NonFiniteEntry { index: usize },
    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entries sum to {sum}, not 1 (pass normalize to rescale)")]
    NotNormalized { sum: f64 },
    #[error("entries sum to zero, cannot normalize")]
    ZeroSum,
    #[error("precision M must be at least 1")]
    ZeroPrecision,
    #[error("counts sum to {sum}, expected precision {precision}")]
    CountMismatch { sum: usize, precision: usize },
    #[error("pre-allocation needs {required} units but precision is {precision}")]
    InfeasiblePrealloc { required: usize, precision: usize },
    #[error("delta for index {index} at step {k} is NaN")]
    NonFiniteDelta { index: usize, k: usize },
    #[error("support size {support} exceeds precision {precision}")]
    InfeasibleSupport { support: usize, precision: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
    #[error("no distribution with all masses >= 1/{precision} exists on {support} points")]
    EmptySimplex { support: usize, precision: usize },
    #[error("approximation has no mass at index {index} where the projection is positive")]
    SupportMismatch { index: usize },
    #[error("transition matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("transition graph is not strongly connected")]
    NotIrreducible,
    #[error("transition ({row}, {col}) is positive but its approximation is zero")]
    SupportViolation { row: usize, col: usize },
    #[error("stationary solve failed: singular system")]
    SingularSystem,
    #[error("instance has {candidates} compositions, above the limit of {limit}")]
    TooLarge { candidates: u128, limit: u128 },
    #[error("invalid precision range [{min}, {max}]")]
    InvalidRange { min: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
