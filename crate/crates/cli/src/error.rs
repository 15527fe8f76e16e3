use std::fmt;

use retina_core::Error;

/// Process exit codes.
pub mod code {
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const DEGENERATE: u8 = 3;
    pub const INSUFFICIENT_POINTS: u8 = 4;
    pub const BAD_INPUT: u8 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(code::USAGE, message)
    }

    /// Failure while reading a user-supplied input file.
    pub fn input(path: &std::path::Path, err: Error) -> Self {
        let code = match err {
            Error::InsufficientPoints { .. } => code::INSUFFICIENT_POINTS,
            _ => code::BAD_INPUT,
        };
        Self::new(code, format!("{}: {err}", path.display()))
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidParams(_)
            | Error::InvalidGamma(_)
            | Error::InvalidSize(_)
            | Error::InvalidConfig(_)
            | Error::DuplicateLayerName(_) => code::USAGE,
            Error::DegenerateKernel { .. } => code::DEGENERATE,
            Error::InsufficientPoints { .. } => code::INSUFFICIENT_POINTS,
            Error::MalformedHeader(_)
            | Error::Unsupported(_)
            | Error::TruncatedData { .. }
            | Error::ShapeOverflow(_)
            | Error::SchemaMismatch(_)
            | Error::Parse(_)
            | Error::InvalidInput(_) => code::BAD_INPUT,
            Error::AmbiguousLabeling(..) | Error::Io(_) => code::FAILURE,
        };
        Self::new(code, err.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = Result<T, CliError>;
