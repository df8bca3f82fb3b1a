use thiserror::Error;

/// Errors produced by the optimizer and its supporting utilities.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SbgdError {
    /// A tunable or function argument is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// The swarm is in a state the requested operation cannot handle.
    #[error("invalid swarm: {0}")]
    InvalidSwarm(String),

    /// Backtracking gave up before the sufficient-decrease test was met.
    #[error("line search failed after {shrinks} shrinks (last step {step:e}); objective may be non-smooth or L mis-scaled")]
    LineSearchFailure { shrinks: u32, step: f64 },

    /// An accepted step fell below the guaranteed lower bound although L was declared exact.
    #[error("accepted step {step:e} below guaranteed bound {bound:e}; declared Lipschitz constant is not a bound")]
    StepBoundViolation { step: f64, bound: f64 },

    /// A computation would exceed its resource budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
}

impl SbgdError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        SbgdError::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = SbgdError> = std::result::Result<T, E>;
