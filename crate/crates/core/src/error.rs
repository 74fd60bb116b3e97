use alloc::string::String;
use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {at} is within {distance:e} of a pole")]
    PoleProximity { at: Complex64, distance: f64 },

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("connection formula lost {digits:.1} digits and no other route applies")]
    Cancellation { digits: f64 },

    #[error("fractional order {0} outside the admissible band")]
    InvalidOrder(Complex64),

    #[error("resolvent is singular at lambda = {0}")]
    SingularResolvent(Complex64),

    #[error("eigenvalue {0} lies on the branch cut (-inf, 0]")]
    BranchCut(Complex64),

    #[error("operator carries no spectral decomposition")]
    MissingSpectralData,

    #[error("operator lacks capability: {0}")]
    Capability(&'static str),

    #[error("contour angle {phi} must lie strictly between {lower} and {upper}")]
    ContourAngle { phi: f64, lower: f64, upper: f64 },

    #[error("function does not decay along the contour: {0}")]
    Decay(String),

    #[error("{what} did not converge (last change {change:e})")]
    NonConvergence { what: &'static str, change: f64 },

    #[error("no decay constant kappa > 0 fits the samples: {0}")]
    FitFailure(String),

    #[error("series did not converge within {terms} terms")]
    TruncationOverflow { terms: usize },

    #[error("extrapolation unstable: log-log fit residual {residual:.3}")]
    ExtrapolationUnstable { residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;
