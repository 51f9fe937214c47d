use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum LtnError {
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: String,
    },

    #[error("invalid node id {node} (graph has {node_count} nodes)")]
    InvalidNode { node: NodeId, node_count: usize },

    #[error("invalid edge id {edge} (graph has {edge_count} edges)")]
    InvalidEdge { edge: u32, edge_count: usize },

    #[error("graph invariant violated: {0}")]
    GraphInvariant(String),

    #[error("weight invariant violated: {0}")]
    WeightInvariant(String),

    #[error("enumeration budget exceeded: {required:.3e} realizations needed, budget {budget:.3e}")]
    EnumerationBudget { required: f64, budget: f64 },

    #[error("feature space degenerate: {0}")]
    DegenerateFeatures(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trace does not match graph: {0}")]
    TraceMismatch(String),
}

pub type Result<T> = std::result::Result<T, LtnError>;
