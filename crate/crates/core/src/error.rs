use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A differencing stencil or chart transition left the open chart.
    #[error("point too close to the boundary of chart {chart} of {space}")]
    Boundary { space: String, chart: usize },

    #[error("no cover member of {space} contains the query point ({what})")]
    Coverage { space: String, what: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("model inconsistency: {0}")]
    ModelInconsistency(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("extension inconsistency: {0}")]
    Extension(String),

    #[error("parse error in {path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn inconsistent(msg: impl Into<String>) -> Self {
        Error::ModelInconsistency(msg.into())
    }
}
