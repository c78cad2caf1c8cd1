use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("evaluation point must be strictly positive (component {index} is {value})")]
    NonPositiveEvaluation { index: usize, value: f64 },

    #[error("invalid combinatorics: {0}")]
    InvalidCombinatorics(String),

    #[error("reducible combinatorics: top prefix of length {0} is invariant")]
    Reducible(usize),

    #[error("loop does not return to its starting combinatorics")]
    NotALoop,

    #[error("unsuitable loop: matrix not strictly positive after {0} repetitions")]
    NotPositive(usize),

    #[error("matrix is not strictly positive")]
    NonPositiveMatrix,

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("orbit passed within {distance:e} of a discontinuity at step {step}")]
    PrecisionAlarm { step: usize, distance: f64 },

    #[error("simulation horizon of {0} steps exceeded")]
    HorizonExceeded(usize),

    #[error("invalid tower system: {0}")]
    InvalidTower(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("path is maximal at this truncation depth")]
    Maximal,

    #[error("path is minimal at this truncation depth")]
    Minimal,

    #[error("path of length {0} is too short for this operation")]
    PathTooShort(usize),

    #[error("height {height} out of range for tower {tower} at level {level} (height {limit})")]
    FloorOutOfRange {
        level: usize,
        tower: usize,
        height: u64,
        limit: u64,
    },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    #[error("amplification cap exceeded: {0}")]
    AmplificationCap(String),

    #[error("instance error: {0}")]
    Instance(String),
}
