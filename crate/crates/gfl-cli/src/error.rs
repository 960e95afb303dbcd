//! CLI error taxonomy: what the user got wrong versus what broke underway,
//! mapped onto the exit codes the toolkit promises (2 and 1 respectively).

use std::fmt;

use gfl_runtime::RuntimeError;

/// A failed invocation, classified for the exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: flags, config keys, paths, schemas, corrupt checkpoints.
    Validation(anyhow::Error),
    /// A run failed underway: transport, protocol, or I/O trouble.
    Runtime(anyhow::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn validation(message: impl fmt::Display) -> Self {
        CliError::Validation(anyhow::anyhow!("{message}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, inner) = match self {
            CliError::Validation(e) => ("invalid input", e),
            CliError::Runtime(e) => ("run failed", e),
        };
        // `{:#}` flattens the context chain into "stage: cause".
        write!(f, "{kind}: {inner:#}")
    }
}

/// Attach the failing stage and classify the error in one step.
pub trait Stage<T> {
    /// The caller handed us something unusable.
    fn validation(self, stage: &str) -> Result<T>;
    /// The work itself fell over.
    fn runtime(self, stage: &str) -> Result<T>;
}

impl<T, E> Stage<T> for std::result::Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn validation(self, stage: &str) -> Result<T> {
        self.map_err(|e| CliError::Validation(anyhow::Error::new(e).context(stage.to_string())))
    }

    fn runtime(self, stage: &str) -> Result<T> {
        self.map_err(|e| CliError::Runtime(anyhow::Error::new(e).context(stage.to_string())))
    }
}

/// Classify a training-run failure: config and usage complaints are the
/// caller's fault, everything else (timeouts, aborts, transport, panics)
/// is a runtime failure.
pub fn classify_run(error: RuntimeError, stage: &str) -> CliError {
    match &error {
        RuntimeError::Config(_) | RuntimeError::Usage(_) => {
            CliError::Validation(anyhow::Error::new(error).context(stage.to_string()))
        }
        _ => CliError::Runtime(anyhow::Error::new(error).context(stage.to_string())),
    }
}
