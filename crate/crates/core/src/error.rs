use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("directed cycle detected through node {node}")]
    Cycle { node: String },

    #[error("no negative pairs: the graph is a complete digraph")]
    NoNegativePairs,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("empty batch for {0}")]
    EmptyBatch(&'static str),

    #[error("non-finite gradient in parameter block `{block}` at index {index}")]
    NonFiniteGradient { block: &'static str, index: usize },

    #[error("input is not a rooted out-tree: {0}")]
    NotATree(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("node mismatch: {0}")]
    NodeMismatch(String),

    #[error("visualization requires 2-dimensional embedding (got k = {0})")]
    Dimension(usize),

    #[error("invalid hyperparameter `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("missing config key `{0}`")]
    MissingKey(String),

    #[error("undefined statistic: {0}")]
    Undefined(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
