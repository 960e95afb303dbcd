use thiserror::Error;

/// Everything that can go wrong while orchestrating a federated run.
#[derive(Debug, Error)]
pub enum RuntimeError {
    /// A configuration value violates its documented range or relation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The run could not even start (endpoint/shard counts off, handshake
    /// failures, and similar).
    #[error("setup failed: {0}")]
    Setup(String),

    /// A training round could not complete; the run stops at this round.
    #[error("round {round} aborted: {detail}")]
    RoundAborted { round: u32, detail: String },

    /// An operation was called with arguments that make no sense for it.
    #[error("usage error: {0}")]
    Usage(String),

    /// A ledger or report does not have the shape the computation needs.
    #[error("accounting error: {0}")]
    Accounting(String),

    #[error(transparent)]
    Core(#[from] gfl_core::CoreError),

    #[error(transparent)]
    Data(#[from] gfl_core::data::DataError),

    #[error(transparent)]
    Transport(#[from] gfl_transport::TransportError),

    /// A worker thread died; the panic payload is lost to the join.
    #[error("worker thread for node {node} panicked")]
    WorkerPanicked { node: u32 },
}

pub type Result<T> = std::result::Result<T, RuntimeError>;
