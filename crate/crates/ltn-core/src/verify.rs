//! Machine-checkable property suites: submodularity/monotonicity of the
//! exact positive-influence function, LT-N vs TS-N distributional
//! equivalence, covariance eigenvalue growth across learner epochs, and the
//! greedy approximation ratio. The CLI `verify` subcommand and the
//! acceptance tests both run through these.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::diffusion::{DiffusionModel, Simulator};
use crate::error::{LtnError, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::learning::{run_algorithm1, Instance, LearnerConfig};
use crate::model::DerivedWeights;
use crate::oracle::{brute_force_opt, exact_positive_influence, exact_positive_influence_all_sets, greedy_select};
use crate::rng::stream_rng;
use crate::synth::generate_random_graph;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    fn new(suite: &str, seed: u64, checks: Vec<CheckResult>) -> Self {
        Self {
            suite: suite.into(),
            seed,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Submodularity,
    Equivalence,
    Eigenvalue,
    GreedyRatio,
    All,
}

impl std::str::FromStr for Suite {
    type Err = LtnError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "submodularity" => Ok(Suite::Submodularity),
            "equivalence" => Ok(Suite::Equivalence),
            "eigenvalue" => Ok(Suite::Eigenvalue),
            "greedy_ratio" => Ok(Suite::GreedyRatio),
            "all" => Ok(Suite::All),
            other => Err(LtnError::Config(format!(
                "unknown suite {other:?} (expected submodularity|equivalence|eigenvalue|greedy_ratio|all)"
            ))),
        }
    }
}

/// Random LT-N weights satisfying every invariant: per-node incoming sums
/// scaled below one, autonomy factors with r(v) <= 1.
pub fn random_valid_weights(graph: &DirectedGraph, rng: &mut impl Rng) -> DerivedWeights {
    let mut edge_weight = vec![0.0; graph.edge_count()];
    for v in 0..graph.node_count() as NodeId {
        let ids = graph.in_edge_ids(v);
        if ids.is_empty() {
            continue;
        }
        let raw: Vec<f64> = ids.iter().map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let scale = rng.random_range(0.3..1.0) / total;
        for (&e, r) in ids.iter().zip(&raw) {
            edge_weight[e as usize] = r * scale;
        }
    }
    let mut q_pos = vec![0.0; graph.node_count()];
    let mut q_neg = vec![0.0; graph.node_count()];
    for v in 0..graph.node_count() {
        q_pos[v] = rng.random_range(0.0..0.6);
        q_neg[v] = rng.random_range(0.0..(1.0 - q_pos[v]));
    }
    DerivedWeights {
        edge_weight,
        q_pos,
        q_neg,
    }
}

fn small_instance(max_nodes: usize, max_mean_in_degree: f64, seed: u64) -> (DirectedGraph, DerivedWeights) {
    let mut rng = stream_rng(seed, 1);
    let n = rng.random_range(3..=max_nodes);
    let max_edges = ((n as f64 * max_mean_in_degree) as usize).min(n * (n - 1));
    let m = rng.random_range(n.min(max_edges)..=max_edges);
    let graph = generate_random_graph(n, m, seed ^ 0xABCD).expect("small graph");
    let weights = random_valid_weights(&graph, &mut rng);
    (graph, weights)
}

/// Exhaustive monotonicity and submodularity of the exact positive spread on
/// seeded random instances: zero violations over all (S, T, v) triples.
pub fn submodularity_suite(instances: usize, max_nodes: usize, seed: u64) -> Result<VerifyReport> {
    let checks: Vec<CheckResult> = (0..instances as u64)
        .into_par_iter()
        .map(|i| -> Result<CheckResult> {
            let (graph, weights) = small_instance(max_nodes, 2.0, stream_seed(seed, i));
            let n = graph.node_count();
            let values = exact_positive_influence_all_sets(&graph, &weights, 1e10)?;
            let mut triples = 0u64;
            let mut monotone_violations = 0u64;
            let mut submodular_violations = 0u64;
            const EPS: f64 = 1e-9;
            for t_mask in 0..(1usize << n) {
                // iterate all subsets s of t_mask
                let mut s_mask = t_mask;
                loop {
                    if values[t_mask] < values[s_mask] - EPS {
                        monotone_violations += 1;
                    }
                    for v in 0..n {
                        if t_mask & (1 << v) != 0 {
                            continue;
                        }
                        triples += 1;
                        let gain_s = values[s_mask | (1 << v)] - values[s_mask];
                        let gain_t = values[t_mask | (1 << v)] - values[t_mask];
                        if gain_s < gain_t - EPS {
                            submodular_violations += 1;
                        }
                    }
                    if s_mask == 0 {
                        break;
                    }
                    s_mask = (s_mask - 1) & t_mask;
                }
            }
            let passed = monotone_violations == 0 && submodular_violations == 0;
            Ok(CheckResult {
                name: format!("instance_{i}"),
                passed,
                details: json!({
                    "nodes": n,
                    "edges": graph.edge_count(),
                    "triples": triples,
                    "monotone_violations": monotone_violations,
                    "submodular_violations": submodular_violations,
                }),
            })
        })
        .collect::<Result<_>>()?;
    Ok(VerifyReport::new("submodularity", seed, checks))
}

fn stream_seed(seed: u64, i: u64) -> u64 {
    crate::rng::derive_seed(seed, i)
}

/// Total variation distance between the empirical |A+| distributions of the
/// LT-N and TS-N processes on small fixtures.
pub fn equivalence_suite(
    fixtures: usize,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> Result<VerifyReport> {
    let checks: Vec<CheckResult> = (0..fixtures as u64)
        .into_par_iter()
        .map(|i| {
            let (graph, weights) = small_instance(8, 2.5, stream_seed(seed, 1000 + i));
            let n = graph.node_count();
            let mut rng = stream_rng(seed, 2000 + i);
            let k = rng.random_range(1..=2.min(n));
            let mut seeds: Vec<NodeId> = rand::seq::index::sample(&mut rng, n, k)
                .iter()
                .map(|x| x as NodeId)
                .collect();
            seeds.sort_unstable();
            let mut h_ltn = vec![0u64; n + 1];
            let mut h_tsn = vec![0u64; n + 1];
            let mut sim = Simulator::ltn(&graph, &weights);
            for _ in 0..samples {
                h_ltn[sim.sample(&seeds, &mut rng).positive as usize] += 1;
                h_tsn[sim.sample_tsn(&seeds, &mut rng).positive as usize] += 1;
            }
            let tv = h_ltn
                .iter()
                .zip(&h_tsn)
                .map(|(&a, &b)| (a as f64 - b as f64).abs())
                .sum::<f64>()
                / (2.0 * samples as f64);
            CheckResult {
                name: format!("fixture_{i}"),
                passed: tv < tolerance,
                details: json!({
                    "nodes": n,
                    "seed_set": seeds,
                    "samples": samples,
                    "tv_distance": tv,
                    "tolerance": tolerance,
                }),
            }
        })
        .collect();
    Ok(VerifyReport::new("equivalence", seed, checks))
}

/// Deterministic eigenvalue growth: after every epoch k of the learner,
/// lambda_min(M_k) >= 1 + k * lambda_min(exploration Gram), and the normal
/// equations hold to 1e-8 relative residual.
pub fn eigenvalue_suite(epochs: u32, seed: u64) -> Result<VerifyReport> {
    let opts = crate::synth::SyntheticOptions::default();
    let (graph, params, _) = crate::synth::synthetic_instance(60, 240, &opts, seed ^ 0x515)?;
    let instance = Instance::new(graph, params, DiffusionModel::Lt)?;
    let mut config = LearnerConfig::for_graph(&instance.graph, opts.d, 0, 3, 1)?;
    config.oracle_samples = 100;
    let schedule = crate::learning::EpochSchedule::new(config.exploration_edges.len(), 0, 1)?;
    let horizon = schedule.final_round_of(epochs);
    let run = run_algorithm1(&instance, &config, horizon, None, seed)?;
    let lambda = run.lambda_min_edge;
    let mut checks = Vec::new();
    for snap in &run.snapshots {
        let bound = 1.0 + snap.epoch as f64 * lambda;
        let eig_ok = snap.lambda_min_m >= bound - 1e-9;
        let res_ok = snap.theta_residual <= 1e-8 * snap.r_norm.max(f64::MIN_POSITIVE);
        checks.push(CheckResult {
            name: format!("epoch_{}", snap.epoch),
            passed: eig_ok && res_ok,
            details: json!({
                "lambda_min_m": snap.lambda_min_m,
                "bound": bound,
                "lambda_min_exploration": lambda,
                "normal_residual": snap.theta_residual,
                "r_norm": snap.r_norm,
            }),
        });
    }
    if checks.len() < epochs as usize {
        checks.push(CheckResult {
            name: "epoch_coverage".into(),
            passed: false,
            details: json!({"snapshots": checks.len(), "expected": epochs}),
        });
    }
    Ok(VerifyReport::new("eigenvalue", seed, checks))
}

/// Greedy with exact evaluation reaches at least (1 - 1/e) of the exact
/// brute-force optimum on small instances.
pub fn greedy_ratio_suite(instances: usize, seed: u64) -> Result<VerifyReport> {
    let ratio_bound = 1.0 - (-1.0f64).exp();
    let checks: Vec<CheckResult> = (0..instances as u64)
        .into_par_iter()
        .map(|i| -> Result<CheckResult> {
            let (graph, weights) = small_instance(10, 1.6, stream_seed(seed, 3000 + i));
            let n = graph.node_count();
            let mut results = Vec::new();
            let mut passed = true;
            for k in 1..=2usize.min(n) {
                let exact = |s: &[NodeId]| exact_positive_influence(&graph, &weights, s, 1e9);
                let candidates: Vec<NodeId> = (0..n as NodeId).collect();
                let (greedy_set, greedy_value) = greedy_select(&candidates, k, exact)?;
                let best = brute_force_opt(&graph, k, 1e6, exact)?;
                let opt = best.value_estimate.mean;
                let ok = greedy_value >= ratio_bound * opt - 1e-9;
                passed &= ok;
                results.push(json!({
                    "k": k,
                    "greedy_set": greedy_set,
                    "greedy_value": greedy_value,
                    "optimum": opt,
                    "realized_alpha": crate::oracle::realized_alpha(greedy_value, opt),
                }));
            }
            Ok(CheckResult {
                name: format!("instance_{i}"),
                passed,
                details: json!({"nodes": n, "budget_results": results, "ratio_bound": ratio_bound}),
            })
        })
        .collect::<Result<_>>()?;
    Ok(VerifyReport::new("greedy_ratio", seed, checks))
}

/// Runs one suite (or all of them) with the default desk-scale parameters.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<VerifyReport>> {
    let mut reports = Vec::new();
    if matches!(suite, Suite::Submodularity | Suite::All) {
        reports.push(submodularity_suite(20, 6, seed)?);
    }
    if matches!(suite, Suite::Equivalence | Suite::All) {
        reports.push(equivalence_suite(5, 100_000, 0.02, seed)?);
    }
    if matches!(suite, Suite::Eigenvalue | Suite::All) {
        reports.push(eigenvalue_suite(20, seed)?);
    }
    if matches!(suite, Suite::GreedyRatio | Suite::All) {
        reports.push(greedy_ratio_suite(5, seed)?);
    }
    Ok(reports)
}

/// Probability-sanity fuzz: the sign-draw probability stays within [0, 1]
/// over random valid configurations.
pub fn sign_probability_fuzz(draws: usize, seed: u64) -> Result<VerifyReport> {
    let mut rng = stream_rng(seed, 4000);
    let mut min_p = f64::INFINITY;
    let mut max_p = f64::NEG_INFINITY;
    for _ in 0..draws {
        let q_pos: f64 = rng.random_range(0.0..=1.0);
        let q_neg: f64 = rng.random_range(0.0..=(1.0 - q_pos));
        let total: f64 = rng.random_range(1e-12..=1.0);
        let positive: f64 = rng.random_range(0.0..=total);
        let p = crate::diffusion::positive_turn_probability(q_pos, q_neg, positive, total);
        min_p = min_p.min(p);
        max_p = max_p.max(p);
    }
    // degenerate corners
    for (qp, qn, pos, tot) in [
        (0.0, 0.0, 0.0, 1.0),
        (1.0, 0.0, 0.0, 1.0),
        (0.0, 1.0, 1.0, 1.0),
        (0.0, 0.0, 1.0, 1.0),
        (0.5, 0.5, 0.3, 0.3),
    ] {
        let p = crate::diffusion::positive_turn_probability(qp, qn, pos, tot);
        min_p = min_p.min(p);
        max_p = max_p.max(p);
    }
    let passed = (0.0..=1.0).contains(&min_p) && (0.0..=1.0).contains(&max_p);
    Ok(VerifyReport::new(
        "sign_probability",
        seed,
        vec![CheckResult {
            name: "range".into(),
            passed,
            details: json!({"draws": draws, "min": min_p, "max": max_p}),
        }],
    ))
}
