use thiserror::Error;

/// Errors raised by the numeric kernel, the GAN, and the metrics helpers.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Input dimensions do not match what the model or operation expects.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Two weight sets disagree on layer names, order, or shapes.
    #[error("congruence violation: {0}")]
    Congruence(String),

    /// Caller violated an operation precondition.
    #[error("usage: {0}")]
    Usage(String),

    /// Operation requires a state the value is not in (e.g. untrained GAN).
    #[error("invalid state: {0}")]
    State(String),

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Dataset pipeline failure surfaced through a numeric operation.
    #[error(transparent)]
    Data(#[from] crate::data::DataError),
}

pub type Result<T> = std::result::Result<T, CoreError>;
