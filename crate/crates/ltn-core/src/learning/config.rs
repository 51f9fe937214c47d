//! Learner configuration: exploration sets, norm bounds, schedule knobs, and
//! the feature-diversity checks behind them.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{LtnError, Result};
use crate::graph::{DirectedGraph, EdgeId, NodeId};

/// Extra seeds added in edge-exploration rounds alongside the edge head.
/// `MaxDegree(m)` picks the m highest-out-degree nodes that neither point at
/// the exploration tail nor are the tail itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoSeed {
    None,
    MaxDegree(usize),
}

/// How often exploitation rounds invoke the oracle. The estimate only
/// changes at epoch boundaries, so one call per epoch is the default;
/// `EveryRound` redraws the oracle's randomness each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleCalls {
    OncePerEpoch,
    EveryRound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnerConfig {
    /// K, the per-round seed budget.
    pub seed_budget: usize,
    /// Exploration edge set (d entries).
    pub exploration_edges: Vec<EdgeId>,
    /// Exploration node set (d' entries; empty when autonomy is not learned).
    pub exploration_nodes: Vec<NodeId>,
    /// D, the norm bound on theta (diagnostics only).
    pub norm_bound_theta: f64,
    /// D', the norm bound on beta (diagnostics only).
    pub norm_bound_beta: f64,
    /// Exploitation growth exponent.
    pub q: u32,
    /// Fold exploitation-round observations into (M, r) as well.
    pub use_exploitation_feedback: bool,
    pub coseed: CoSeed,
    /// Monte Carlo samples per greedy evaluation.
    pub oracle_samples: usize,
    pub oracle_calls: OracleCalls,
    /// Enforce positive-definite exploration Gram matrices at validation.
    pub require_feature_diversity: bool,
}

impl LearnerConfig {
    pub fn new(exploration_edges: Vec<EdgeId>, exploration_nodes: Vec<NodeId>, seed_budget: usize, q: u32) -> Self {
        Self {
            seed_budget,
            exploration_edges,
            exploration_nodes,
            norm_bound_theta: 2.0,
            norm_bound_beta: 1.0,
            q,
            use_exploitation_feedback: false,
            coseed: CoSeed::None,
            oracle_samples: 1000,
            oracle_calls: OracleCalls::OncePerEpoch,
            require_feature_diversity: true,
        }
    }

    /// Builds a config with exploration sets selected from the graph.
    pub fn for_graph(graph: &DirectedGraph, d: usize, d_prime: usize, seed_budget: usize, q: u32) -> Result<Self> {
        let (edges, nodes) = select_exploration_sets(graph, d, d_prime)?;
        Ok(Self::new(edges, nodes, seed_budget, q))
    }

    pub fn validate(&self, graph: &DirectedGraph) -> Result<ConfigDiagnostics> {
        if self.seed_budget == 0 || self.seed_budget > graph.node_count() {
            return Err(LtnError::Config(format!(
                "seed budget {} outside 1..={}",
                self.seed_budget,
                graph.node_count()
            )));
        }
        if self.q == 0 {
            return Err(LtnError::Config("q must be >= 1".into()));
        }
        if self.exploration_edges.is_empty() {
            return Err(LtnError::Config("need at least one exploration edge".into()));
        }
        let mut seen_edges = std::collections::HashSet::new();
        for &e in &self.exploration_edges {
            graph.check_edge(e)?;
            if !seen_edges.insert(e) {
                return Err(LtnError::Config(format!("duplicate exploration edge {e}")));
            }
        }
        let mut seen_nodes = std::collections::HashSet::new();
        for &v in &self.exploration_nodes {
            graph.check_node(v)?;
            if !seen_nodes.insert(v) {
                return Err(LtnError::Config(format!("duplicate exploration node {v}")));
            }
            if graph.in_degree(v) == 0 {
                return Err(LtnError::Config(format!(
                    "exploration node {v} has no parents"
                )));
            }
        }
        let lambda_min_edge = gram_min_eigenvalue(
            self.exploration_edges
                .iter()
                .map(|&e| graph.edge_feature(e)),
        );
        let lambda_min_auto = gram_min_eigenvalue(
            self.exploration_nodes
                .iter()
                .map(|&v| graph.autonomy_neg(v)),
        );
        if self.require_feature_diversity {
            if lambda_min_edge <= 0.0 {
                return Err(LtnError::DegenerateFeatures(format!(
                    "edge exploration Gram has min eigenvalue {lambda_min_edge}"
                )));
            }
            if !self.exploration_nodes.is_empty() && lambda_min_auto <= 0.0 {
                return Err(LtnError::DegenerateFeatures(format!(
                    "autonomy exploration Gram has min eigenvalue {lambda_min_auto}"
                )));
            }
        }
        Ok(ConfigDiagnostics {
            lambda_min_edge,
            lambda_min_auto,
        })
    }
}

/// Minimum eigenvalues of the exploration Gram matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfigDiagnostics {
    pub lambda_min_edge: f64,
    pub lambda_min_auto: f64,
}

/// lambda_min of sum_i x_i x_i^T.
pub fn gram_min_eigenvalue<'a>(features: impl Iterator<Item = &'a DVector<f64>>) -> f64 {
    let mut gram: Option<DMatrix<f64>> = None;
    for x in features {
        let g = gram.get_or_insert_with(|| DMatrix::zeros(x.len(), x.len()));
        g.ger(1.0, x, x, 1.0);
    }
    match gram {
        Some(g) => g
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min),
        None => 0.0,
    }
}

/// The theoretical confidence radius c_k (or kappa_k for the autonomy side):
/// sqrt(dim * ln(1 + k*dim) + dim * ln(k^q)) + norm_bound. Diagnostics only;
/// the learner never consumes it.
pub fn confidence_radius(dim: usize, k: u32, q: u32, norm_bound: f64) -> f64 {
    if k == 0 || dim == 0 {
        return norm_bound;
    }
    let d = dim as f64;
    let k = k as f64;
    (d * (1.0 + k * d).ln() + d * (q as f64) * k.ln()).sqrt() + norm_bound
}

fn greedy_diverse_pick(
    dim: usize,
    candidates: &[(u32, &DVector<f64>)],
    count: usize,
    kind: &str,
) -> Result<Vec<u32>> {
    if candidates.len() < count {
        return Err(LtnError::DegenerateFeatures(format!(
            "only {} {kind} candidates for {count} exploration slots",
            candidates.len()
        )));
    }
    let mut gram = DMatrix::<f64>::zeros(dim, dim);
    let mut picked: Vec<u32> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best: Option<(f64, f64, u32, &DVector<f64>)> = None;
        for &(id, x) in candidates {
            if picked.contains(&id) {
                continue;
            }
            let mut g = gram.clone();
            g.ger(1.0, x, x, 1.0);
            let eig = g.symmetric_eigen().eigenvalues;
            let lambda_min = eig.iter().copied().fold(f64::INFINITY, f64::min);
            // volume proxy breaks lambda_min ties while the Gram is singular
            let logdet: f64 = eig.iter().map(|&l| (l + 1.0).ln()).sum();
            let better = match best {
                None => true,
                Some((bl, bd, bid, _)) => {
                    lambda_min > bl + 1e-12
                        || ((lambda_min - bl).abs() <= 1e-12 && logdet > bd + 1e-12)
                        || ((lambda_min - bl).abs() <= 1e-12
                            && (logdet - bd).abs() <= 1e-12
                            && id < bid)
                }
            };
            if better {
                best = Some((lambda_min, logdet, id, x));
            }
        }
        let (_, _, id, x) = best.expect("candidate set checked non-empty");
        gram.ger(1.0, x, x, 1.0);
        picked.push(id);
    }
    let lambda = gram
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if lambda <= 0.0 {
        return Err(LtnError::DegenerateFeatures(format!(
            "no positive-definite {kind} exploration set exists (best min eigenvalue {lambda})"
        )));
    }
    Ok(picked)
}

/// Greedily scans edges (then nodes) accumulating feature outer products,
/// each pick maximizing the updated minimum eigenvalue, until `d` edges and
/// `d_prime` nodes are chosen. Errors when no positive-definite set exists.
pub fn select_exploration_sets(
    graph: &DirectedGraph,
    d: usize,
    d_prime: usize,
) -> Result<(Vec<EdgeId>, Vec<NodeId>)> {
    if graph.edge_count() > 0 && !graph.has_features() {
        return Err(LtnError::Config("graph has no features attached".into()));
    }
    let edge_candidates: Vec<(u32, &DVector<f64>)> = (0..graph.edge_count() as EdgeId)
        .map(|e| (e, graph.edge_feature(e)))
        .collect();
    let edges = greedy_diverse_pick(graph.feature_dim(), &edge_candidates, d, "edge")?;
    let nodes = if d_prime == 0 {
        Vec::new()
    } else {
        let node_candidates: Vec<(u32, &DVector<f64>)> = (0..graph.node_count() as NodeId)
            .filter(|&v| graph.in_degree(v) >= 1)
            .map(|v| (v, graph.autonomy_neg(v)))
            .collect();
        greedy_diverse_pick(graph.autonomy_dim(), &node_candidates, d_prime, "node")?
    };
    Ok((edges, nodes))
}
