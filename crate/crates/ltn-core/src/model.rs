//! Linear parameterization of edge weights and node autonomy factors.
//!
//! Weights come from `w(e) = <x(e), theta>` and autonomy factors from
//! `q+(v) = <x+(v), beta>`, `q-(v) = <x-(v), beta>`. `derive_weights` either
//! repairs invariant violations (clip negatives, rescale per node) or rejects
//! them, depending on the `sanitize` flag.

use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{LtnError, Result};
use crate::graph::{DirectedGraph, NodeId};

/// Slack for floating-point comparisons against the [0,1] weight bounds.
pub const WEIGHT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelParams {
    pub theta: Vec<f64>,
    pub beta: Vec<f64>,
    /// Norm bound D on theta (ground-truth contract).
    pub norm_bound_theta: f64,
    /// Norm bound D' on beta.
    pub norm_bound_beta: f64,
}

impl ModelParams {
    pub fn new(theta: Vec<f64>, beta: Vec<f64>, norm_bound_theta: f64, norm_bound_beta: f64) -> Self {
        Self {
            theta,
            beta,
            norm_bound_theta,
            norm_bound_beta,
        }
    }

    pub fn theta_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.theta)
    }

    pub fn beta_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.beta)
    }

    pub fn theta_norm(&self) -> f64 {
        self.theta.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn beta_norm(&self) -> f64 {
        self.beta.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Ground-truth contract: parameter norms within the declared bounds.
    pub fn validate_ground_truth(&self) -> Result<()> {
        if self.theta_norm() > self.norm_bound_theta + WEIGHT_EPS {
            return Err(LtnError::Config(format!(
                "||theta|| = {:.6} exceeds bound D = {:.6}",
                self.theta_norm(),
                self.norm_bound_theta
            )));
        }
        if self.beta_norm() > self.norm_bound_beta + WEIGHT_EPS {
            return Err(LtnError::Config(format!(
                "||beta|| = {:.6} exceeds bound D' = {:.6}",
                self.beta_norm(),
                self.norm_bound_beta
            )));
        }
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LtnError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| LtnError::Config(format!(
            "bad params file {}: {e}",
            path.display()
        )))
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("params serialize");
        std::fs::write(path, text).map_err(|source| LtnError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Edge weights and autonomy factors realized from a parameter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedWeights {
    pub edge_weight: Vec<f64>,
    pub q_pos: Vec<f64>,
    pub q_neg: Vec<f64>,
}

impl DerivedWeights {
    pub fn belief(&self, v: NodeId) -> f64 {
        self.q_pos[v as usize] + self.q_neg[v as usize]
    }

    pub fn weight(&self, eid: u32) -> f64 {
        self.edge_weight[eid as usize]
    }

    /// Uniform autonomy-free weights, for classical-LT style uses.
    pub fn from_edge_weights(graph: &DirectedGraph, edge_weight: Vec<f64>) -> Self {
        Self {
            edge_weight,
            q_pos: vec![0.0; graph.node_count()],
            q_neg: vec![0.0; graph.node_count()],
        }
    }

    /// Scans all invariants: w(e) in [0,1], per-node incoming sums <= 1,
    /// q+(v), q-(v) >= 0, r(v) <= 1.
    pub fn validate(&self, graph: &DirectedGraph) -> Result<()> {
        if self.edge_weight.len() != graph.edge_count() {
            return Err(LtnError::DimensionMismatch {
                expected: graph.edge_count(),
                actual: self.edge_weight.len(),
                context: "edge weights".into(),
            });
        }
        if self.q_pos.len() != graph.node_count() || self.q_neg.len() != graph.node_count() {
            return Err(LtnError::DimensionMismatch {
                expected: graph.node_count(),
                actual: self.q_pos.len().min(self.q_neg.len()),
                context: "autonomy factors".into(),
            });
        }
        for (eid, &w) in self.edge_weight.iter().enumerate() {
            if !(-WEIGHT_EPS..=1.0 + WEIGHT_EPS).contains(&w) {
                return Err(LtnError::WeightInvariant(format!(
                    "w(e{eid}) = {w} outside [0,1]"
                )));
            }
        }
        for v in 0..graph.node_count() as NodeId {
            let sum: f64 = graph
                .in_edge_ids(v)
                .iter()
                .map(|&e| self.edge_weight[e as usize])
                .sum();
            if sum > 1.0 + WEIGHT_EPS {
                return Err(LtnError::WeightInvariant(format!(
                    "incoming weight sum {sum} > 1 at node {v}"
                )));
            }
            let (qp, qn) = (self.q_pos[v as usize], self.q_neg[v as usize]);
            if qp < -WEIGHT_EPS || qn < -WEIGHT_EPS {
                return Err(LtnError::WeightInvariant(format!(
                    "negative autonomy factor at node {v}: q+ = {qp}, q- = {qn}"
                )));
            }
            if qp + qn > 1.0 + WEIGHT_EPS {
                return Err(LtnError::WeightInvariant(format!(
                    "belief score r({v}) = {} > 1",
                    qp + qn
                )));
            }
        }
        Ok(())
    }
}

/// Realizes weights and autonomy factors from parameters.
///
/// With `sanitize` set, invariant violations are repaired: negative values
/// clip to zero, a node whose incoming weights sum past 1 has them scaled
/// down uniformly by the sum, and a belief score past 1 has both autonomy
/// factors scaled by 1/r. Without it, any violation is an error.
pub fn derive_weights(
    graph: &DirectedGraph,
    params: &ModelParams,
    sanitize: bool,
) -> Result<DerivedWeights> {
    if graph.edge_count() > 0 {
        if !graph.has_features() {
            return Err(LtnError::Config("graph has no features attached".into()));
        }
        if graph.feature_dim() != params.theta.len() {
            return Err(LtnError::DimensionMismatch {
                expected: graph.feature_dim(),
                actual: params.theta.len(),
                context: "theta vs edge feature dimension".into(),
            });
        }
    }
    if graph.node_count() > 0 && graph.autonomy_dim() != params.beta.len() {
        return Err(LtnError::DimensionMismatch {
            expected: graph.autonomy_dim(),
            actual: params.beta.len(),
            context: "beta vs autonomy feature dimension".into(),
        });
    }

    let theta = params.theta_vector();
    let beta = params.beta_vector();
    let mut edge_weight: Vec<f64> = (0..graph.edge_count())
        .map(|e| graph.edge_feature(e as u32).dot(&theta))
        .collect();
    let mut q_pos: Vec<f64> = (0..graph.node_count())
        .map(|v| graph.autonomy_pos(v as NodeId).dot(&beta))
        .collect();
    let mut q_neg: Vec<f64> = (0..graph.node_count())
        .map(|v| graph.autonomy_neg(v as NodeId).dot(&beta))
        .collect();

    if sanitize {
        for w in &mut edge_weight {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        for v in 0..graph.node_count() as NodeId {
            let sum: f64 = graph
                .in_edge_ids(v)
                .iter()
                .map(|&e| edge_weight[e as usize])
                .sum();
            if sum > 1.0 {
                for &e in graph.in_edge_ids(v) {
                    edge_weight[e as usize] /= sum;
                }
            }
        }
        for v in 0..graph.node_count() {
            if q_pos[v] < 0.0 {
                q_pos[v] = 0.0;
            }
            if q_neg[v] < 0.0 {
                q_neg[v] = 0.0;
            }
            let r = q_pos[v] + q_neg[v];
            if r > 1.0 {
                q_pos[v] /= r;
                q_neg[v] /= r;
            }
        }
    }

    let weights = DerivedWeights {
        edge_weight,
        q_pos,
        q_neg,
    };
    if !sanitize {
        weights.validate(graph)?;
    }
    Ok(weights)
}
