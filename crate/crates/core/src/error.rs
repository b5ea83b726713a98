use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the decoding pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed sidecar {path}: {reason}")]
    Sidecar { path: PathBuf, reason: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite sample at channel {channel}, sample {sample}, trial {trial}")]
    NonFinite {
        channel: usize,
        sample: usize,
        trial: usize,
    },
    #[error("degenerate channel {channel} in trial {trial}: zero variance")]
    DegenerateChannel { channel: usize, trial: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("filter design failed: {0}")]
    FilterDesign(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("feature selection failed: {0}")]
    Selection(String),
    #[error("classifier failure: {0}")]
    Classifier(String),
    #[error("held-out trials reached a training stage: {0}")]
    Leakage(String),
    #[error("malformed csv {path}: {reason}")]
    Csv { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Sidecar { .. }
                | Error::Dimension(_)
                | Error::NonFinite { .. }
                | Error::DegenerateChannel { .. }
                | Error::InvalidParameter(_)
                | Error::Csv { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
