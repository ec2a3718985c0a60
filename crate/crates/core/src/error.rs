use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid input to {op}: {msg}")]
    Invalid { op: &'static str, msg: String },

    #[error("edge ({src}, {dst}) out of range for graph with {n} nodes")]
    EdgeOutOfRange { src: usize, dst: usize, n: usize },

    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("node {0} has no neighbors to aggregate over")]
    EmptyNeighborhood(usize),

    #[error("schema: {0}")]
    Schema(String),

    #[error("column `{0}` named in schema is missing from the CSV header")]
    MissingColumn(String),

    #[error("row {row}: {msg}")]
    Row { row: usize, msg: String },

    #[error("field `{0}` is incompatible with the checkpoint encoder")]
    FieldMismatch(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Invalid {
            op,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for failures caused by input data rather than configuration or code.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::MissingColumn(_)
                | Error::Schema(_)
                | Error::Checkpoint(_)
                | Error::Row { .. }
                | Error::Csv(_)
                | Error::Io { .. }
                | Error::EdgeOutOfRange { .. }
                | Error::EmptyGraph
                | Error::FieldMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
