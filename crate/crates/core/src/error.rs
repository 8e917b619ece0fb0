use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum SimError {
    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A run inside a sweep failed; carries the offending scenario.
    #[error("scenario {scenario} failed: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<SimError>,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("malformed results file {}: {reason}", path.display())]
    Parse { path: PathBuf, reason: String },
}

impl SimError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True when the error stems from user configuration rather than the runtime.
    pub fn is_config(&self) -> bool {
        match self {
            SimError::Config { .. } => true,
            SimError::Scenario { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
