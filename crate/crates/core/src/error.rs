//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A malformed record in a CSV or JSON input. `line` is 1-based and
    /// refers to the physical line of the source file.
    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },

    /// A structurally valid input that violates a precondition (empty
    /// dataset, batch size larger than the training set, ...).
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_error_mentions_line() {
        let err = Error::parse(17, "bad-point-count");
        assert_eq!(err.to_string(), "bad-point-count at line 17");
    }

    #[test]
    fn io_error_converts() {
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        let err: Error = io.into();
        assert!(err.to_string().contains("gone"));
    }
}
