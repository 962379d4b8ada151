//! Crate error type and process exit codes.

use thiserror::Error;

/// Unified error for all library operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad epsilon, empty feature list, unknown
    /// generator kind, malformed config file, and similar.
    #[error("config: {0}")]
    Config(String),

    /// Malformed or inconsistent data: CSV parse failures, schema mismatches,
    /// out-of-domain values, empty datasets where rows are required.
    #[error("data: {0}")]
    Data(String),

    /// Runtime failure: I/O, serialization, exhausted budget, internal
    /// invariant violations.
    #[error("runtime: {0}")]
    Runtime(String),
}

impl Error {
    /// Process exit code for the CLI: config errors 2, data errors 3,
    /// runtime errors 4. Success is 0.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) => 3,
            Error::Runtime(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Runtime(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Runtime(format!("json: {e}"))
    }
}
