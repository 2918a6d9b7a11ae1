use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the library. Every variant carries enough context to
/// tell the caller which input was rejected or which computation gave up.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("boundary speed v = {0} must satisfy 1e-12 < v < 1 - 1e-12")]
    InvalidSpeed(f64),

    #[error("Lorentz factor gamma = {0} must be finite and > 1")]
    InvalidGamma(f64),

    #[error("squeeze rate rho = {0} must satisfy 0 < rho < 1")]
    InvalidSqueeze(f64),

    #[error("contraction duration T = {duration} must satisfy 0 < T < l_i/v = {collapse} (the cavity collapses at l_i/v)")]
    InvalidDuration { duration: f64, collapse: f64 },

    #[error("initial length l_i = {0} must be finite and positive")]
    InvalidLength(f64),

    #[error("mode index must be >= 1, got {0}")]
    InvalidMode(usize),

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("truncation {requested} exceeds the dense-storage limit {limit}")]
    TruncationLimit { requested: usize, limit: usize },

    #[error("quadrature budget exhausted for {context}: best estimate {best}, achieved error {error:e}")]
    QuadratureBudget {
        context: String,
        best: Complex64,
        error: f64,
    },

    #[error("entry ({row}, {col}): {source}")]
    Entry {
        row: usize,
        col: usize,
        source: Box<Error>,
    },

    #[error("unitarity drift {drift:e} exceeds {threshold:e} at chi = {chi}")]
    UnitarityDrift { drift: f64, threshold: f64, chi: f64 },

    #[error("step size underflow at chi = {chi} (step {step:e})")]
    StepUnderflow { chi: f64, step: f64 },

    #[error("ODE integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at(self, row: usize, col: usize) -> Self {
        Error::Entry {
            row,
            col,
            source: Box::new(self),
        }
    }
}
