//! Seeded synthetic instances: random hub-skewed digraphs plus feature
//! vectors and ground-truth parameters whose derived weights satisfy every
//! model invariant without sanitation.
//!
//! Edge features start as the elementwise product of endpoint node vectors,
//! get a random perturbation for diversity, and are then repaired in feature
//! space: a feature vector whose weight would be negative is zeroed, and
//! per-node incoming scalings keep weight sums and aggregated feature norms
//! at most one. Out-edges of a few highest-out-degree nodes are scaled down
//! so the best seed set is not simply the top-degree set.

use nalgebra::DVector;
use rand::distr::weighted::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{LtnError, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::model::{derive_weights, DerivedWeights, ModelParams};

#[derive(Debug, Clone)]
pub struct SyntheticOptions {
    pub d: usize,
    pub d_prime: usize,
    /// Global scale target for the mean per-node incoming weight sum.
    pub target_mean_in_sum: f64,
    /// Global scale target for the mean belief score r(v).
    pub target_mean_belief: f64,
    /// How many of the highest-out-degree nodes get their out-edges damped.
    pub downscale_nodes: usize,
    pub downscale_factor: f64,
    pub theta_norm: f64,
    pub beta_norm: f64,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        Self {
            d: 5,
            d_prime: 2,
            target_mean_in_sum: 0.55,
            target_mean_belief: 0.5,
            downscale_nodes: 5,
            downscale_factor: 0.15,
            theta_norm: 1.89,
            beta_norm: 0.8,
        }
    }
}

/// Hand-picked sign pattern: three positive entries then two negative for
/// d = 5, cycled otherwise. Magnitudes are random, the norm is fixed.
fn pick_theta(d: usize, rng: &mut ChaCha8Rng, norm: f64) -> Vec<f64> {
    let positives = (3 * d).div_ceil(5);
    let mut theta: Vec<f64> = (0..d)
        .map(|i| {
            let mag = rng.random_range(0.5..1.2);
            if i < positives {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let cur: f64 = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut theta {
        *x *= norm / cur;
    }
    theta
}

/// Generates edge and autonomy features plus ground-truth parameters for an
/// existing graph. Deterministic in `seed`. The returned parameters together
/// with the attached features pass `derive_weights(.., sanitize = false)`.
pub fn generate_synthetic_features(
    graph: &mut DirectedGraph,
    opts: &SyntheticOptions,
    seed: u64,
) -> Result<ModelParams> {
    if opts.d == 0 || opts.d_prime == 0 {
        return Err(LtnError::Config("feature dimensions must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = graph.node_count();
    let m = graph.edge_count();
    let d = opts.d;
    let dp = opts.d_prime;

    let theta = pick_theta(d, &mut rng, opts.theta_norm);
    let theta_v = DVector::from_column_slice(&theta);

    // Node vectors stand in for the embedding the edge features derive from.
    let node_vecs: Vec<DVector<f64>> = (0..n)
        .map(|_| DVector::from_fn(d, |_, _| rng.random_range(0.0..1.0)))
        .collect();
    let mut edge_features: Vec<DVector<f64>> = graph
        .edges()
        .iter()
        .map(|&(u, v)| {
            let mut x = node_vecs[u as usize].component_mul(&node_vecs[v as usize]);
            for e in x.iter_mut() {
                *e *= rng.random_range(0.5..1.5);
            }
            x
        })
        .collect();

    // Negative weights are repaired in feature space so w = <x, theta> stays
    // exact: zero the whole feature vector.
    for x in &mut edge_features {
        if x.dot(&theta_v) < 0.0 {
            x.fill(0.0);
        }
    }

    // Global scale so the mean incoming weight sum hits its target.
    if m > 0 {
        let mut sums = vec![0.0f64; n];
        for (eid, &(_, v)) in graph.edges().iter().enumerate() {
            sums[v as usize] += edge_features[eid].dot(&theta_v);
        }
        let nodes_with_in = sums.iter().filter(|&&s| s > 0.0).count().max(1);
        let mean = sums.iter().sum::<f64>() / nodes_with_in as f64;
        if mean > 0.0 {
            let scale = opts.target_mean_in_sum / mean;
            for x in &mut edge_features {
                *x *= scale;
            }
        }
    }

    // Damp out-edges of the top out-degree nodes.
    if opts.downscale_nodes > 0 && n > 0 {
        let mut by_degree: Vec<NodeId> = (0..n as NodeId).collect();
        by_degree.sort_by_key(|&v| (std::cmp::Reverse(graph.out_degree(v)), v));
        for &v in by_degree.iter().take(opts.downscale_nodes) {
            for &e in graph.out_edge_ids(v) {
                edge_features[e as usize] *= opts.downscale_factor;
            }
        }
    }

    // Per-node repairs, feature-norm cap first, weight-sum cap second (the
    // second multiplies by <= 1 so the first stays satisfied).
    for v in 0..n as NodeId {
        let in_ids = graph.in_edge_ids(v).to_vec();
        if in_ids.is_empty() {
            continue;
        }
        let mut agg = DVector::zeros(d);
        for &e in &in_ids {
            agg += &edge_features[e as usize];
        }
        let norm = agg.norm();
        if norm > 1.0 {
            for &e in &in_ids {
                edge_features[e as usize] /= norm;
            }
        }
        let sum: f64 = in_ids
            .iter()
            .map(|&e| edge_features[e as usize].dot(&theta_v))
            .sum();
        if sum > 1.0 {
            for &e in &in_ids {
                edge_features[e as usize] /= sum;
            }
        }
    }

    // Autonomy factors: nonnegative features against a nonnegative beta.
    let mut beta: Vec<f64> = (0..dp).map(|_| rng.random_range(0.3..0.9)).collect();
    let cur: f64 = beta.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut beta {
        *x *= opts.beta_norm / cur;
    }
    let beta_v = DVector::from_column_slice(&beta);

    let mut autonomy_pos: Vec<DVector<f64>> = (0..n)
        .map(|_| DVector::from_fn(dp, |_, _| rng.random_range(0.0..1.0)))
        .collect();
    let mut autonomy_neg: Vec<DVector<f64>> = (0..n)
        .map(|_| DVector::from_fn(dp, |_, _| rng.random_range(0.0..1.0)))
        .collect();
    if n > 0 {
        let mean_r: f64 = (0..n)
            .map(|v| autonomy_pos[v].dot(&beta_v) + autonomy_neg[v].dot(&beta_v))
            .sum::<f64>()
            / n as f64;
        if mean_r > 0.0 {
            let scale = opts.target_mean_belief / mean_r;
            for x in autonomy_pos.iter_mut().chain(autonomy_neg.iter_mut()) {
                *x *= scale;
            }
        }
        for v in 0..n {
            let r = autonomy_pos[v].dot(&beta_v) + autonomy_neg[v].dot(&beta_v);
            if r > 1.0 {
                autonomy_pos[v] /= r;
                autonomy_neg[v] /= r;
            }
        }
    }

    graph.attach_features(edge_features, autonomy_pos, autonomy_neg)?;
    let norm_bound_theta = opts.theta_norm.max(2.0);
    let norm_bound_beta = opts.beta_norm.max(1.0);
    let params = ModelParams::new(theta, beta, norm_bound_theta, norm_bound_beta);
    params.validate_ground_truth()?;
    // Post-condition: the construction needs no sanitation.
    derive_weights(graph, &params, false)?;
    Ok(params)
}

/// Random simple digraph with `edge_count` distinct directed edges and a mild
/// hub skew (endpoint sampling weights follow rank^-0.8).
pub fn generate_random_graph(node_count: usize, edge_count: usize, seed: u64) -> Result<DirectedGraph> {
    if node_count < 2 && edge_count > 0 {
        return Err(LtnError::Config(
            "need at least two nodes to place an edge".into(),
        ));
    }
    let max_edges = node_count.saturating_mul(node_count.saturating_sub(1));
    if edge_count > max_edges {
        return Err(LtnError::Config(format!(
            "{edge_count} edges requested but a simple digraph on {node_count} nodes holds at most {max_edges}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (1..=node_count).map(|r| (r as f64).powf(-0.8)).collect();
    let index = WeightedIndex::new(&weights)
        .map_err(|e| LtnError::Config(format!("degree weights: {e}")))?;
    let mut seen = std::collections::HashSet::with_capacity(edge_count * 2);
    let mut edges = Vec::with_capacity(edge_count);
    while edges.len() < edge_count {
        let u = index.sample(&mut rng) as NodeId;
        let v = index.sample(&mut rng) as NodeId;
        if u != v && seen.insert((u, v)) {
            edges.push((u, v));
        }
    }
    DirectedGraph::new(node_count, edges)
}

/// Convenience: random graph plus synthetic features and ground truth.
pub fn synthetic_instance(
    node_count: usize,
    edge_count: usize,
    opts: &SyntheticOptions,
    seed: u64,
) -> Result<(DirectedGraph, ModelParams, DerivedWeights)> {
    let mut graph = generate_random_graph(node_count, edge_count, seed)?;
    let params = generate_synthetic_features(&mut graph, opts, seed.wrapping_add(1))?;
    let weights = derive_weights(&graph, &params, false)?;
    Ok((graph, params, weights))
}
