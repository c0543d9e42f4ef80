use thiserror::Error;

use crate::spectral::Wavevector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size must be even and at least 8, got {0}")]
    InvalidGrid(usize),

    #[error("grid mismatch: expected n = {expected}, got n = {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("invalid spectral field: {0}")]
    InvalidField(String),

    #[error("multiplier is not even in k at {k}: {plus} vs {minus}")]
    NonEvenSymbol {
        k: Wavevector,
        plus: f64,
        minus: f64,
    },

    #[error("multiplier is not finite at {k}")]
    NonFiniteSymbol { k: Wavevector },

    #[error("weight exponent {exponent:.3} at {k} exceeds the representable range")]
    WeightOverflow { k: Wavevector, exponent: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("step at t = {t} grew the field norm by {growth:.3e}x (dt too large?)")]
    StabilityViolation { t: f64, growth: f64 },

    #[error("initial data has zero norm")]
    ZeroInitialData,

    #[error("picard iteration diverged: distances grew at iterations {0:?}")]
    Divergence(Vec<usize>),

    #[error("remaining time must be positive, got {0}")]
    NonPositiveRemaining(f64),

    #[error("energy ledger is empty")]
    EmptyLedger,

    #[error("{inequality} violated at {location} (slack {slack:e})")]
    InequalityViolated {
        inequality: String,
        location: String,
        slack: f64,
    },

    #[error("band [{min}, {max}] out of range for grid n = {n} (dealiased cutoff {cutoff})")]
    BandOutOfRange {
        min: f64,
        max: f64,
        n: usize,
        cutoff: i32,
    },

    #[error("config parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("config validation error on `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("malformed field file at line {line}: {message}")]
    FieldFormat { line: usize, message: String },
}
