use thiserror::Error;

/// Errors raised by the numerical routines and samplers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{field}` out of domain: {reason}")]
    OutOfDomain { field: &'static str, reason: String },

    #[error("stability indices differ ({0} vs {1})")]
    AlphaMismatch(f64, f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature failed to reach tolerance (estimate {estimate:e}, error {error:e})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("no proposal accepted after {0} attempts")]
    RejectionBudgetExceeded(u64),

    #[error("empty input")]
    EmptyInput,

    #[error("only {0} tail observations between the requested quantiles (need at least 100)")]
    InsufficientTail(usize),

    #[error("time {t} outside the path horizon [0, {horizon}]")]
    OutOfRange { t: f64, horizon: f64 },
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::OutOfDomain { field, reason: reason.into() }
    }

    /// Stable identifier of the error variant, used in machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutOfDomain { .. } => "OutOfDomain",
            Error::AlphaMismatch(..) => "AlphaMismatch",
            Error::Unsupported(_) => "Unsupported",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::RejectionBudgetExceeded(_) => "RejectionBudgetExceeded",
            Error::EmptyInput => "EmptyInput",
            Error::InsufficientTail(_) => "InsufficientTail",
            Error::OutOfRange { .. } => "OutOfRange",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
