use thiserror::Error;

/// Errors raised by lattice construction, spectral solves and the derived
/// observables.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("interval length {length} is not an integer multiple of spacing {a}")]
    NonIntegralSites { length: f64, a: f64 },

    #[error("lattice needs at least 2 intervals, got {sites}")]
    TooFewSites { sites: usize },

    #[error("parameter `{name}` is invalid: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("potential is singular or non-finite at x = {x}")]
    PotentialPole { x: f64 },

    #[error("core position x0 = {x0} must lie strictly left of the interval start {x_left}")]
    CoreInsideInterval { x0: f64, x_left: f64 },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("site index {n} outside 0..={max}")]
    SiteOutOfRange { n: usize, max: usize },

    #[error("eigenvalue {index} did not converge after {iterations} QL sweeps")]
    NoConvergence { index: usize, iterations: usize },

    #[error("eigenvalue {index} is negative ({value}); the operator is not positive")]
    NegativeEigenvalue { index: usize, value: f64 },

    #[error("{0}")]
    Scheme(String),

    #[error("fit is ill-posed: {0}")]
    Fit(String),

    #[error("fit residual {residual:e} exceeds threshold {threshold:e}")]
    FitResidual { residual: f64, threshold: f64 },

    #[error("{what} = {value} is outside its domain of validity")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("renormalization terms failed to cancel: leak {leak:e} against scale {scale:e}")]
    CancellationLeak { leak: f64, scale: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {v}")))
    }
}
