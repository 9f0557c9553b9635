use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("unknown cluster id {cluster} (partition has {clusters} clusters)")]
    UnknownCluster { cluster: usize, clusters: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("sampling set is empty")]
    EmptySamplingSet,

    #[error("true signal has zero norm; NMSE is undefined")]
    ZeroSignal,

    #[error(
        "sampling budget unreachable: {collected} of {budget} distinct nodes after {walks} walks"
    )]
    BudgetUnreachable {
        budget: usize,
        collected: usize,
        walks: usize,
    },

    #[error("no connected draw after {0} attempts")]
    ConnectivityUnreachable(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Runtime failures (as opposed to bad input) map to CLI exit code 2.
    pub fn is_runtime(&self) -> bool {
        matches!(
            self,
            Error::BudgetUnreachable { .. } | Error::ConnectivityUnreachable(_) | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
