use std::path::PathBuf;

use crate::detect::Verdict;
use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Malformed { path: PathBuf, line: u64, message: String },

    #[error("{path}:{line}: node {id} is not declared in the node table")]
    UndeclaredNode { path: PathBuf, line: u64, id: NodeId },

    #[error("{path}:{line}: duplicate node id {id}")]
    DuplicateNode { path: PathBuf, line: u64, id: NodeId },

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("node {0} was paired with itself")]
    SameNode(NodeId),

    #[error("K = {k} is out of range; at most {max} node pairs exist")]
    KOutOfRange { k: usize, max: usize },

    #[error("no weight recorded for edge ({0}, {1})")]
    MissingWeight(NodeId, NodeId),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("column {0} has no mass")]
    EmptyColumn(usize),

    #[error("verification oracle failed after {} verdicts: {message}", partial.len())]
    Oracle { message: String, partial: Vec<Verdict> },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
