use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violates a shape or ordering requirement (wrong point count,
    /// non-increasing timestamps, mismatched lengths).
    #[error("structural error: {0}")]
    Structural(String),

    /// Eye with zero horizontal span; the frame cannot produce an EAR.
    #[error("degenerate eye: {0}")]
    DegenerateEye(String),

    /// A quantity fell outside the domain of the operation (log of zero).
    #[error("domain error: {0}")]
    Domain(String),

    /// Market data does not cover a requested instant or window.
    #[error("data coverage: {0}")]
    Coverage(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate regressor: {0}")]
    DegenerateRegressor(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// An upstream pipeline stage has not produced its outputs yet.
    #[error("missing stage output: {0}")]
    MissingStage(String),

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, msg: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.to_string(),
        }
    }

    /// Process exit code: 1 for configuration problems, 2 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Scenario(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
