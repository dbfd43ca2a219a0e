use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Leading entry is zero, so the sequence has no convolution inverse.
    #[error("singular sequence: leading entry is zero")]
    SingularSequence,

    #[error("argument outside supported domain: {0}")]
    UnsupportedDomain(String),

    /// The per-step nonlinear solve did not converge.
    #[error("nonlinear solve failed at step {step}: {reason}")]
    StepFailure { step: usize, reason: String },

    /// The right-hand side produced a non-finite value.
    #[error("non-finite right-hand side value at step {step}")]
    Evaluation { step: usize },

    /// `1 - lambda h^alpha a_0 = 0` in the linear test recurrence.
    #[error("singular implicit step: 1 - lambda*h^alpha*a0 vanishes")]
    SingularStep,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("quadrature did not reach tolerance (estimated error {0:e})")]
    Quadrature(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
