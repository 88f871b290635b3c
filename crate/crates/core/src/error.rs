use thiserror::Error;

/// Errors produced by network construction, evaluation and the oracles.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes do not chain, or an input has the wrong length.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A parameter is outside the range an operation accepts.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A point lies outside the region an oracle is defined on.
    #[error("point {point:?} lies outside the domain {domain}")]
    Domain { point: Vec<f64>, domain: String },

    /// A document could not be parsed or failed validation.
    #[error("parse error at {position}: {message}")]
    Parse { position: String, message: String },
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn parse(position: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            position: position.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        let position = format!("line {}, column {}", err.line(), err.column());
        // serde_json appends " at line X column Y" to its own message
        let message = err
            .to_string()
            .split(" at line ")
            .next()
            .unwrap_or_default()
            .to_string();
        Error::Parse { position, message }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
