use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Infeasible,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}, row {row}: {message}")]
    Row {
        file: String,
        row: usize,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible mode share {target}: at most {achievable:.6} of trip mass can be labeled")]
    InfeasibleModeShare { target: f64, achievable: f64 },

    #[error("lambda calibration stalled at labeled fraction {achieved} (target {target})")]
    LambdaNotConverged { target: f64, achieved: f64 },

    #[error("series is empty")]
    EmptySeries,

    #[error("no admissible lag: overlap of series of length {x_len} and {y_len} is shorter than {min_overlap} days at every lag")]
    NoAdmissibleLag {
        x_len: usize,
        y_len: usize,
        min_overlap: usize,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Csv(e) if e.is_io_error() => ErrorKind::Io,
            Error::InfeasibleModeShare { .. } | Error::LambdaNotConverged { .. } => {
                ErrorKind::Infeasible
            }
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
