use thiserror::Error;

use crate::numerics::Complex;

/// Errors raised anywhere in the library.
///
/// Variants are grouped by the subsystem that raises them; the CLI maps
/// each one onto an exit code through [`Error::is_physics_violation`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    // Sampled data and grids
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("grid too sparse: {points} points, at least {required} required")]
    GridTooSparse { points: usize, required: usize },
    #[error("a tail model is required: {0}")]
    MissingTailModel(String),

    // Hardy-class checks and transforms
    #[error("offset must be strictly positive, got {0}")]
    NonPositiveOffset(f64),
    #[error("analytic model has a pole at {pole} inside the tested half-plane")]
    PoleOnContinuationLine { pole: Complex },
    #[error("point {z} is not interior to the requested half-plane")]
    WrongHalfPlane { z: Complex },
    #[error("truncation error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    TruncationErrorExceeded { estimate: f64, tolerance: f64 },
    #[error("input is not causal: sample at t = {t} has magnitude {magnitude:e}")]
    NonCausalInput { t: f64, magnitude: f64 },
    #[error("input is not square-integrable: {0}")]
    NonIntegrableInput(String),
    #[error("input must be built from analytic models")]
    NonAnalyticInput,

    // Quadrature
    #[error("singularity {singularity} lies outside the grid span [{lo}, {hi}]")]
    SingularityOutsideGrid { singularity: f64, lo: f64, hi: f64 },
    #[error("quadrature tolerance not met: error estimate {estimate:e} > {tolerance:e}")]
    ToleranceNotMet { estimate: f64, tolerance: f64 },
    #[error("integrand does not decay fast enough: {0}")]
    NonDecayingIntegrand(String),

    // Dynamics
    #[error("time evolution is only defined for t >= 0, got t = {0}")]
    NegativeTime(f64),
    #[error("the divergence check requires t < 0, got t = {0}")]
    NonNegativeTime(f64),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("channel (l = {l}, l3 = {l3}) is malformed")]
    IncompatibleChannels { l: i64, l3: i64 },

    // Ensembles
    #[error("registration precedes preparation at record(s) {indices:?}")]
    CausalityViolation { indices: Vec<usize> },
    #[error("decay rate must be strictly positive and finite, got {0}")]
    InvalidRate(f64),
    #[error("sequential scheme provides {available} preparation times, {required} needed")]
    InvalidSchemeLength { available: usize, required: usize },
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    // I/O
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors that signal a detected physics or consistency
    /// violation rather than bad input.
    pub fn is_physics_violation(&self) -> bool {
        matches!(
            self,
            Error::CausalityViolation { .. } | Error::NonCausalInput { .. } | Error::PoleOnContinuationLine { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
