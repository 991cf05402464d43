// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Row indices are 0-based over the physical lines of the file.
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("times must be strictly increasing (row {row}: {previous} followed by {current})")]
    Ordering {
        row: usize,
        previous: f64,
        current: f64,
    },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("split of {requested} samples exceeds series length {available}")]
    Bounds { requested: usize, available: usize },

    #[error("log filter requires strictly positive values (found {value} at index {index})")]
    Domain { index: usize, value: f64 },

    #[error("degenerate time axis: all {count} timestamps equal {value}")]
    DegenerateAxis { count: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("size mismatch: {0}")]
    Size(String),

    #[error("malformed model file: {0}")]
    Format(String),

    #[error("training diverged at epoch {epoch} (rmse {rmse})")]
    Diverged { epoch: usize, rmse: f64 },

    #[error("MAPE undefined: actual value is zero at index {index}")]
    UndefinedMetric { index: usize },

    #[error("integration produced a non-finite state at step {step}")]
    Integration { step: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
