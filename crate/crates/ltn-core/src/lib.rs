//! Negativity-aware linear threshold (LT-N) diffusion with its live-edge
//! equivalent construction (TS-N), greedy positive-influence maximization,
//! and epoch-scheduled online learning from node-level feedback.

pub mod diffusion;
pub mod error;
pub mod experiment;
pub mod feedback;
pub mod graph;
pub mod learning;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod synth;
pub mod verify;

pub use error::{LtnError, Result};
pub use graph::{DirectedGraph, EdgeId, NodeId};
pub use model::{derive_weights, DerivedWeights, ModelParams};
