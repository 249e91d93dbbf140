use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("the edge set is empty")]
    EmptyEdgeSet,

    #[error("{what}: instance of size {size} exceeds the exact-computation cap {cap}")]
    InstanceTooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("weighting is infeasible: {0}")]
    Infeasible(String),

    #[error("moments of the statistic are not available under this model: {0}")]
    UnknownMoments(String),

    #[error("fractional chromatic number unavailable")]
    ChromaticUnavailable,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
