use thiserror::Error;

/// Errors raised by the numerical kernels and bound evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {reason}")]
    Domain {
        func: &'static str,
        reason: String,
    },

    /// The exact result is not representable as a finite `f64`.
    #[error("overflow in {func} at argument {arg}")]
    Overflow { func: &'static str, arg: f64 },

    /// A parameter object violates one of its invariants.
    #[error("invalid parameter `{field}` = {value}: {reason}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The requested quantity diverges (e.g. the always-on LED limit).
    #[error("unbounded: {0}")]
    Unbounded(&'static str),

    /// An iterative routine ran out of budget before meeting its tolerance.
    #[error(
        "{routine} did not converge: estimate {estimate:e}, error {error:e}, after {iterations} steps"
    )]
    NonConvergence {
        routine: &'static str,
        estimate: f64,
        error: f64,
        iterations: usize,
    },
}

impl Error {
    pub(crate) fn domain(func: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            func,
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag, used in CSV error rows.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::Overflow { .. } => "overflow",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Unbounded(_) => "unbounded",
            Error::NonConvergence { .. } => "non_convergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
