use std::fmt;
use std::path::PathBuf;

use confidence_core::Error as ModelError;

/// Process exit status for configuration and usage problems.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Config { line: Option<usize>, message: String },
    Model(ModelError),
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self::Config { line: None, message: message.into() }
    }

    pub fn at_line(line: usize, message: impl Into<String>) -> Self {
        Self::Config { line: Some(line), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => EXIT_CONFIG,
            Self::Io { .. } => 1,
            Self::Model(e) => match e {
                ModelError::QuadratureNotConverged { .. }
                | ModelError::PayoffNotIntegrable
                | ModelError::DegenerateDenominator(_)
                | ModelError::TooFewSamples(_)
                | ModelError::DegenerateSample
                | ModelError::NonPositiveBandwidth(_) => EXIT_NUMERICAL,
                _ => EXIT_CONFIG,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config { line: Some(line), message } => write!(f, "config error at line {line}: {message}"),
            Self::Config { line: None, message } => write!(f, "config error: {message}"),
            Self::Model(e) => write!(f, "{e}"),
            Self::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Self::Model(e) => Some(e),
            Self::Io { source, .. } => Some(source),
            Self::Config { .. } => None,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::Model(e)
    }
}
