use thiserror::Error;

/// Errors raised by the solver, the studies and the diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} modes vs {right} modes")]
    GridMismatch { left: usize, right: usize },

    #[error("sample length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("field is not mean-zero: |u(0)| = {value:e}")]
    MeanNotZero { value: f64 },

    #[error("non-finite value after step {step}")]
    BlowUp { step: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("rate fit needs at least 3 valid points, got {0}")]
    TooFewPoints(usize),

    #[error("rate fit needs positive errors, got {0:e}")]
    NonPositiveError(f64),

    #[error("reference validation failed: pair difference {difference:e} exceeds {threshold:e}")]
    ReferenceValidation { difference: f64, threshold: f64 },

    #[error("ratio undefined: zero denominator")]
    ZeroDenominator,

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
