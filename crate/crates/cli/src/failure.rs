//! Error values carrying the process exit code.

use std::fmt;
use std::path::Path;

use exciton_core::{Error, OracleError, SpectralError};

/// Exit status for bad input, bad usage or I/O trouble.
pub const EXIT_INPUT: u8 = 1;
/// Exit status for an internal-consistency failure of the pipeline.
pub const EXIT_INTERNAL: u8 = 2;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: format!("usage: {}", message.into()),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: format!("I/O error on {}: {err}", path.display()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn spectral_code(e: &SpectralError) -> u8 {
    match e {
        SpectralError::DiscretenessViolated(_) | SpectralError::GridTooSmall(_) => EXIT_INPUT,
        _ => EXIT_INTERNAL,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Spectral(s) | Error::Oracle(OracleError::Spectral(s)) => spectral_code(s),
            Error::Oracle(_) => EXIT_INTERNAL,
            Error::Graph(_) | Error::Family(_) | Error::Loop(_) | Error::Instance(_) => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        Error::from(e).into()
    }
}
