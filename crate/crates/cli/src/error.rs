use std::fmt;

use supralap_core::Error;

/// A command failure together with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable or unwritable files and malformed input files (exit 1).
    Io(String),
    /// Invalid flag values (exit 2).
    Usage(String),
    /// A generator could not produce a valid network (exit 3).
    Generation(String),
    /// The requested method does not apply to the input (exit 4).
    Mismatch(String),
    /// A numerical routine failed (exit 5).
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Generation(_) => 3,
            CliError::Mismatch(_) => 4,
            CliError::Numeric(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            CliError::Io(m) => ("input/output error", m),
            CliError::Usage(m) => ("invalid arguments", m),
            CliError::Generation(m) => ("generation failed", m),
            CliError::Mismatch(m) => ("method does not apply", m),
            CliError::Numeric(m) => ("numerical failure", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

impl std::error::Error for CliError {}

/// Errors raised while generating networks.
pub fn generation(e: Error) -> CliError {
    match e {
        Error::InvalidConfig(m) => CliError::Usage(m),
        Error::InvalidWeights(m) => CliError::Usage(m),
        Error::BadDimension(m) => CliError::Usage(m),
        other => CliError::Generation(other.to_string()),
    }
}

/// Errors raised while computing spectra or residuals.
pub fn numeric(e: Error) -> CliError {
    match e {
        Error::NoConvergence { .. } => CliError::Numeric(e.to_string()),
        Error::InvalidConfig(m) => CliError::Usage(m),
        Error::IndexOutOfRange { .. } => CliError::Usage(e.to_string()),
        other => CliError::Numeric(other.to_string()),
    }
}
