//! The multi-round learning loops: the node-level-feedback explore-exploit
//! learner for classical LT, its LT-N extension with autonomy learning, and
//! the baseline policies, all emitting per-round records and per-epoch
//! estimator snapshots.

use std::collections::HashMap;

use nalgebra::DVector;
use rand::Rng;

use crate::diffusion::{run_lt, run_ltn, run_tsn, DiffusionModel, DiffusionTrace};
use crate::error::{LtnError, Result};
use crate::feedback::{extract_exploration_edge_feedback, extract_feedback};
use crate::graph::{DirectedGraph, EdgeId, NodeId};
use crate::learning::config::{CoSeed, LearnerConfig, OracleCalls};
use crate::learning::ridge::RidgeState;
use crate::learning::schedule::{EpochSchedule, Phase};
use crate::model::{derive_weights, DerivedWeights, ModelParams};
use crate::oracle::{estimate_influence, exact_positive_influence_all_sets, greedy_oracle};
use crate::rng::{derive_seed, stream_rng};

/// A fully specified simulation environment: graph, ground-truth parameters,
/// the weights they induce, and which cascade semantics rounds run under.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: DirectedGraph,
    pub params: ModelParams,
    pub weights: DerivedWeights,
    pub model: DiffusionModel,
}

impl Instance {
    /// Ground-truth contract: the parameters must satisfy every weight
    /// invariant without sanitation.
    pub fn new(graph: DirectedGraph, params: ModelParams, model: DiffusionModel) -> Result<Self> {
        let weights = derive_weights(&graph, &params, false)?;
        Ok(Self {
            graph,
            params,
            weights,
            model,
        })
    }

    fn theta_star(&self) -> DVector<f64> {
        self.params.theta_vector()
    }

    fn beta_star(&self) -> DVector<f64> {
        self.params.beta_vector()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    /// The epoch-scheduled explore-exploit learner with exponent q.
    ExploreExploit { q: u32 },
    /// K fresh uniformly random seeds each round.
    Random,
    /// The K highest-out-degree nodes every round.
    MaxDegree,
    /// Greedy oracle fed the true weights every round.
    KnownWeightsGreedy,
    /// Learns by splitting each node observation equally across the
    /// contributing edges, then runs greedy on its estimate every round.
    SplitAttribution,
}

impl Policy {
    pub fn name(&self) -> String {
        match self {
            Policy::ExploreExploit { q } => format!("grd_explr_q={q}"),
            Policy::Random => "rdm".into(),
            Policy::MaxDegree => "bgg_dgr".into(),
            Policy::KnownWeightsGreedy => "grd_kw".into(),
            Policy::SplitAttribution => "grd_splt".into(),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        if let Some(q) = name.strip_prefix("grd_explr_q=") {
            let q: u32 = q
                .parse()
                .map_err(|_| LtnError::Config(format!("bad policy {name:?}")))?;
            return Ok(Policy::ExploreExploit { q });
        }
        match name {
            "rdm" => Ok(Policy::Random),
            "bgg_dgr" => Ok(Policy::MaxDegree),
            "grd_kw" => Ok(Policy::KnownWeightsGreedy),
            "grd_splt" => Ok(Policy::SplitAttribution),
            other => Err(LtnError::Config(format!("unknown policy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FStarMethod {
    BruteForce,
    GreedyMc,
}

/// Regret accounting inputs: the per-instance benchmark f*, the oracle's
/// (alpha, gamma) credit, and how policy values are Monte Carlo estimated.
#[derive(Debug, Clone)]
pub struct RegretConfig {
    pub f_star: f64,
    pub f_star_method: FStarMethod,
    pub alpha: f64,
    pub gamma: f64,
    /// Samples per policy-value estimate (cached per distinct seed set).
    pub value_samples: usize,
    pub seed: u64,
}

impl RegretConfig {
    pub fn new(f_star: f64, f_star_method: FStarMethod, value_samples: usize, seed: u64) -> Self {
        Self {
            f_star,
            f_star_method,
            alpha: 1.0,
            gamma: 1.0,
            value_samples,
            seed,
        }
    }
}

/// Scaled regret of one round.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RegretRecord {
    pub round: u64,
    pub policy_value: f64,
    pub scaled_regret: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub f_star: f64,
}

/// One row per round of a learner run.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    /// Epoch index for scheduled learners; 0 for plain policies.
    pub epoch: u32,
    pub phase: String,
    pub seed_set: Vec<NodeId>,
    /// Realized objective count of the round's cascade.
    pub reward: u32,
    pub cumulative_reward: u64,
    pub policy_value: Option<f64>,
    pub scaled_regret: Option<f64>,
    pub theta_error: Option<f64>,
    pub beta_error: Option<f64>,
}

/// Estimator state recorded at each epoch refresh.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSnapshot {
    pub epoch: u32,
    pub round: u64,
    pub theta: Vec<f64>,
    pub beta: Vec<f64>,
    pub lambda_min_m: f64,
    pub lambda_min_v: f64,
    pub theta_residual: f64,
    pub beta_residual: f64,
    pub r_norm: f64,
    pub s_norm: f64,
    pub confidence_radius_theta: f64,
    pub confidence_radius_beta: f64,
}

#[derive(Debug, Clone)]
pub struct LearnerRun {
    pub policy: String,
    pub records: Vec<RoundRecord>,
    pub snapshots: Vec<EpochSnapshot>,
    pub regrets: Vec<RegretRecord>,
    /// Minimum eigenvalue of the edge exploration Gram (0 when unused).
    pub lambda_min_edge: f64,
    /// Minimum eigenvalue of the autonomy exploration Gram (0 when unused).
    pub lambda_min_auto: f64,
}

/// R_t = f* - value / (alpha * gamma).
pub fn compute_scaled_regret(f_star: f64, policy_value: f64, alpha: f64, gamma: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0 && gamma > 0.0 && gamma <= 1.0) {
        return Err(LtnError::Config(format!(
            "alpha and gamma must lie in (0, 1], got ({alpha}, {gamma})"
        )));
    }
    if f_star < 0.0 {
        return Err(LtnError::Config(format!("f* must be nonnegative, got {f_star}")));
    }
    Ok(f_star - policy_value / (alpha * gamma))
}

/// Benchmark value f* for an instance: exact brute force over all seed sets
/// when the enumeration fits the budget, otherwise known-weights greedy with
/// a high-sample Monte Carlo evaluation of its final set.
pub fn compute_f_star(
    instance: &Instance,
    seed_budget: usize,
    brute_budget: f64,
    mc_samples: usize,
    seed: u64,
) -> Result<(f64, FStarMethod)> {
    let n = instance.graph.node_count();
    if n <= 15 {
        // classical LT spread equals positive spread when every correction
        // is +1, so one enumerator serves both objectives
        let weights = match instance.model {
            DiffusionModel::Lt => DerivedWeights {
                edge_weight: instance.weights.edge_weight.clone(),
                q_pos: vec![1.0; n],
                q_neg: vec![0.0; n],
            },
            _ => instance.weights.clone(),
        };
        if let Ok(values) = exact_positive_influence_all_sets(&instance.graph, &weights, brute_budget)
        {
            let best = values
                .iter()
                .enumerate()
                .filter(|(mask, _)| (mask.count_ones() as usize) <= seed_budget)
                .map(|(_, &v)| v)
                .fold(0.0f64, f64::max);
            return Ok((best, FStarMethod::BruteForce));
        }
    }
    let mut rng = stream_rng(seed, 17);
    let greedy = greedy_oracle(
        &instance.graph,
        &instance.weights,
        instance.model,
        seed_budget,
        mc_samples,
        &mut rng,
    )?;
    // re-estimate the chosen set on fresh randomness
    let est = estimate_influence(
        &instance.graph,
        &instance.weights,
        instance.model,
        &greedy.seed_set,
        mc_samples,
        &mut rng,
    )?;
    Ok((est.mean, FStarMethod::GreedyMc))
}

fn realized_trace(instance: &Instance, seeds: &[NodeId], rng: &mut impl Rng) -> Result<DiffusionTrace> {
    match instance.model {
        DiffusionModel::Lt => run_lt(&instance.graph, &instance.weights, seeds, rng),
        DiffusionModel::Ltn => run_ltn(&instance.graph, &instance.weights, seeds, rng),
        DiffusionModel::Tsn => run_tsn(&instance.graph, &instance.weights, seeds, rng),
    }
}

/// Shared per-round bookkeeping: realized reward, cached policy values,
/// regret records.
struct RoundLogger<'a> {
    instance: &'a Instance,
    regret: Option<&'a RegretConfig>,
    value_cache: HashMap<Vec<NodeId>, f64>,
    cumulative: u64,
    records: Vec<RoundRecord>,
    regrets: Vec<RegretRecord>,
}

impl<'a> RoundLogger<'a> {
    fn new(instance: &'a Instance, regret: Option<&'a RegretConfig>) -> Self {
        Self {
            instance,
            regret,
            value_cache: HashMap::new(),
            cumulative: 0,
            records: Vec::new(),
            regrets: Vec::new(),
        }
    }

    fn policy_value(&mut self, seeds: &[NodeId]) -> Result<Option<f64>> {
        let Some(regret) = self.regret else {
            return Ok(None);
        };
        if let Some(&v) = self.value_cache.get(seeds) {
            return Ok(Some(v));
        }
        // per-set stream so the cache is deterministic under any call order
        let set_seed = seeds
            .iter()
            .fold(regret.seed, |acc, &v| derive_seed(acc, v as u64 + 1));
        let mut rng = stream_rng(set_seed, 0);
        let est = estimate_influence(
            &self.instance.graph,
            &self.instance.weights,
            self.instance.model,
            seeds,
            regret.value_samples,
            &mut rng,
        )?;
        self.value_cache.insert(seeds.to_vec(), est.mean);
        Ok(Some(est.mean))
    }

    #[allow(clippy::too_many_arguments)]
    fn log(
        &mut self,
        round: u64,
        epoch: u32,
        phase: &str,
        seeds: Vec<NodeId>,
        trace: &DiffusionTrace,
        theta_error: Option<f64>,
        beta_error: Option<f64>,
    ) -> Result<()> {
        let reward = match self.instance.model {
            DiffusionModel::Lt => trace.active_count() as u32,
            _ => trace.positive_count() as u32,
        };
        self.cumulative += reward as u64;
        let policy_value = self.policy_value(&seeds)?;
        let scaled_regret = match (policy_value, self.regret) {
            (Some(value), Some(cfg)) => {
                let r = compute_scaled_regret(cfg.f_star, value, cfg.alpha, cfg.gamma)?;
                self.regrets.push(RegretRecord {
                    round,
                    policy_value: value,
                    scaled_regret: r,
                    alpha: cfg.alpha,
                    gamma: cfg.gamma,
                    f_star: cfg.f_star,
                });
                Some(r)
            }
            _ => None,
        };
        self.records.push(RoundRecord {
            round,
            epoch,
            phase: phase.to_string(),
            seed_set: seeds,
            reward,
            cumulative_reward: self.cumulative,
            policy_value,
            scaled_regret,
            theta_error,
            beta_error,
        });
        Ok(())
    }
}

fn sanitized_estimate_weights(
    graph: &DirectedGraph,
    theta: &DVector<f64>,
    beta: Option<&DVector<f64>>,
) -> Result<DerivedWeights> {
    let beta_vec = match beta {
        Some(b) => b.iter().copied().collect(),
        None => vec![0.0; graph.autonomy_dim()],
    };
    let params = ModelParams::new(theta.iter().copied().collect(), beta_vec, f64::INFINITY, f64::INFINITY);
    derive_weights(graph, &params, true)
}

/// Co-seeds for one exploration edge: the m highest-out-degree nodes that
/// are not the head, not the tail, and do not point at the tail.
fn coseeds_for_edge(graph: &DirectedGraph, eid: EdgeId, m: usize) -> Vec<NodeId> {
    let (head, tail) = graph.edge(eid);
    let mut nodes: Vec<NodeId> = (0..graph.node_count() as NodeId)
        .filter(|&v| v != head && v != tail)
        .filter(|&v| graph.out_neighbors(v).all(|t| t != tail))
        .collect();
    nodes.sort_by_key(|&v| (std::cmp::Reverse(graph.out_degree(v)), v));
    nodes.truncate(m);
    nodes
}

/// The fixed parent seed set N(v) for an autonomy exploration node: its
/// min(in-degree, K) smallest-index parents.
fn autonomy_parent_seeds(graph: &DirectedGraph, v: NodeId, k: usize) -> Vec<NodeId> {
    let mut parents: Vec<NodeId> = graph.in_neighbors(v).collect();
    parents.sort_unstable();
    parents.dedup();
    parents.truncate(k);
    parents
}

fn explore_exploit_run(
    instance: &Instance,
    config: &LearnerConfig,
    horizon: u64,
    regret: Option<&RegretConfig>,
    seed: u64,
    learn_autonomy: bool,
) -> Result<LearnerRun> {
    let graph = &instance.graph;
    let diagnostics = config.validate(graph)?;
    if learn_autonomy {
        if config.exploration_nodes.is_empty() {
            return Err(LtnError::Config(
                "autonomy learning needs at least one exploration node".into(),
            ));
        }
        if instance.model == DiffusionModel::Lt {
            return Err(LtnError::Config(
                "autonomy learning needs a negativity-aware instance".into(),
            ));
        }
    } else if !config.exploration_nodes.is_empty() {
        return Err(LtnError::Config(
            "classical learner runs with d' = 0 (no exploration nodes)".into(),
        ));
    }

    let schedule = EpochSchedule::new(
        config.exploration_edges.len(),
        config.exploration_nodes.len(),
        config.q,
    )?;
    let mut ridge = RidgeState::new(graph.feature_dim(), graph.autonomy_dim());
    let theta_star = instance.theta_star();
    let beta_star = instance.beta_star();

    let coseeds: Vec<Vec<NodeId>> = match config.coseed {
        CoSeed::None => vec![Vec::new(); config.exploration_edges.len()],
        CoSeed::MaxDegree(m) => config
            .exploration_edges
            .iter()
            .map(|&e| coseeds_for_edge(graph, e, m))
            .collect(),
    };
    let parent_seeds: Vec<Vec<NodeId>> = config
        .exploration_nodes
        .iter()
        .map(|&v| autonomy_parent_seeds(graph, v, config.seed_budget))
        .collect();

    let mut rng = stream_rng(seed, 0);
    let mut logger = RoundLogger::new(instance, regret);
    let mut snapshots: Vec<EpochSnapshot> = Vec::new();
    let mut theta_refreshed = 0u32; // epoch of the latest refresh
    let mut beta_refreshed = 0u32;
    let mut snapshot_done = 0u32;
    let mut cached_seed_set: Option<(u32, Vec<NodeId>)> = None;

    for (idx, rp) in schedule.phases(horizon).enumerate() {
        let t = idx as u64 + 1;
        let k = rp.epoch;
        match rp.phase {
            Phase::ExploreEdge(i) => {
                let eid = config.exploration_edges[i];
                let head = graph.edge(eid).0;
                let tail = graph.edge(eid).1;
                let mut seeds = vec![head];
                seeds.extend_from_slice(&coseeds[i]);
                seeds.sort_unstable();
                seeds.dedup();
                let trace = realized_trace(instance, &seeds, &mut rng)?;
                for obs in extract_feedback(graph, &trace)? {
                    if obs.node == tail {
                        continue;
                    }
                    ridge
                        .theta
                        .observe(&obs.aggregated_feature, obs.activation_label as u8 as f64);
                }
                let special = extract_exploration_edge_feedback(graph, &trace, eid)?;
                ridge
                    .theta
                    .observe(&special.aggregated_feature, special.activation_label as u8 as f64);
                logger.log(
                    t,
                    k,
                    "explore_edge",
                    seeds,
                    &trace,
                    Some((ridge.theta.estimate() - &theta_star).norm()),
                    learn_autonomy.then(|| (ridge.beta.estimate() - &beta_star).norm()),
                )?;
            }
            Phase::ExploreNode(i) => {
                if theta_refreshed < k {
                    ridge.theta.refresh()?;
                    theta_refreshed = k;
                }
                let v = config.exploration_nodes[i];
                let seeds = parent_seeds[i].clone();
                let trace = realized_trace(instance, &seeds, &mut rng)?;
                // the autonomy update fires only on step-1 activations, where
                // every recent influencer is a (positive) seed
                if trace.activation_step(v) == Some(2) {
                    let y_plus = trace.sign(v) > 0;
                    ridge
                        .beta
                        .observe(graph.autonomy_neg(v), 1.0 - y_plus as u8 as f64);
                }
                logger.log(
                    t,
                    k,
                    "explore_node",
                    seeds,
                    &trace,
                    Some((ridge.theta.estimate() - &theta_star).norm()),
                    Some((ridge.beta.estimate() - &beta_star).norm()),
                )?;
            }
            Phase::Exploit => {
                if theta_refreshed < k {
                    ridge.theta.refresh()?;
                    theta_refreshed = k;
                }
                if learn_autonomy && beta_refreshed < k {
                    ridge.beta.refresh()?;
                    beta_refreshed = k;
                }
                if snapshot_done < k {
                    snapshots.push(EpochSnapshot {
                        epoch: k,
                        round: t,
                        theta: ridge.theta.estimate().iter().copied().collect(),
                        beta: ridge.beta.estimate().iter().copied().collect(),
                        lambda_min_m: ridge.theta.min_eigenvalue(),
                        lambda_min_v: ridge.beta.min_eigenvalue(),
                        theta_residual: ridge.theta.normal_residual(),
                        beta_residual: ridge.beta.normal_residual(),
                        r_norm: ridge.theta.reward().norm(),
                        s_norm: ridge.beta.reward().norm(),
                        confidence_radius_theta: super::confidence_radius(
                            graph.feature_dim(),
                            k,
                            config.q,
                            config.norm_bound_theta,
                        ),
                        confidence_radius_beta: super::confidence_radius(
                            graph.autonomy_dim(),
                            k,
                            config.q,
                            config.norm_bound_beta,
                        ),
                    });
                    snapshot_done = k;
                }
                let reuse = matches!(config.oracle_calls, OracleCalls::OncePerEpoch)
                    && cached_seed_set.as_ref().is_some_and(|(ck, _)| *ck == k);
                if !reuse {
                    let beta_est = learn_autonomy.then(|| ridge.beta.estimate());
                    let what = sanitized_estimate_weights(graph, ridge.theta.estimate(), beta_est)?;
                    let oracle = greedy_oracle(
                        graph,
                        &what,
                        instance.model,
                        config.seed_budget,
                        config.oracle_samples,
                        &mut rng,
                    )?;
                    cached_seed_set = Some((k, oracle.seed_set));
                }
                let seeds = cached_seed_set.as_ref().expect("cached above").1.clone();
                let trace = realized_trace(instance, &seeds, &mut rng)?;
                if config.use_exploitation_feedback {
                    for obs in extract_feedback(graph, &trace)? {
                        ridge
                            .theta
                            .observe(&obs.aggregated_feature, obs.activation_label as u8 as f64);
                    }
                }
                logger.log(
                    t,
                    k,
                    "exploit",
                    seeds,
                    &trace,
                    Some((ridge.theta.estimate() - &theta_star).norm()),
                    learn_autonomy.then(|| (ridge.beta.estimate() - &beta_star).norm()),
                )?;
            }
        }
    }

    Ok(LearnerRun {
        policy: Policy::ExploreExploit { q: config.q }.name(),
        records: logger.records,
        snapshots,
        regrets: logger.regrets,
        lambda_min_edge: diagnostics.lambda_min_edge,
        lambda_min_auto: diagnostics.lambda_min_auto,
    })
}

/// The classical-LT node-level-feedback learner: epochs of d edge-exploration
/// rounds followed by k^q exploitation rounds. Requires d' = 0 and an LT
/// instance.
pub fn run_algorithm1(
    instance: &Instance,
    config: &LearnerConfig,
    horizon: u64,
    regret: Option<&RegretConfig>,
    seed: u64,
) -> Result<LearnerRun> {
    if instance.model != DiffusionModel::Lt {
        return Err(LtnError::Config(
            "the classical learner expects an LT instance".into(),
        ));
    }
    explore_exploit_run(instance, config, horizon, regret, seed, false)
}

/// The LT-N learner: d edge-exploration rounds, d' autonomy-exploration
/// rounds seeding each exploration node's fixed parent set, then k^q
/// exploitation rounds with both estimates fed to the oracle.
pub fn run_algorithm2(
    instance: &Instance,
    config: &LearnerConfig,
    horizon: u64,
    regret: Option<&RegretConfig>,
    seed: u64,
) -> Result<LearnerRun> {
    explore_exploit_run(instance, config, horizon, regret, seed, true)
}

/// Runs one of the non-scheduled policies for `horizon` rounds.
#[allow(clippy::too_many_arguments)]
pub fn run_baseline(
    instance: &Instance,
    policy: Policy,
    seed_budget: usize,
    oracle_samples: usize,
    oracle_calls: OracleCalls,
    horizon: u64,
    regret: Option<&RegretConfig>,
    seed: u64,
) -> Result<LearnerRun> {
    let graph = &instance.graph;
    if seed_budget == 0 || seed_budget > graph.node_count() {
        return Err(LtnError::Config(format!(
            "seed budget {seed_budget} outside 1..={}",
            graph.node_count()
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let mut logger = RoundLogger::new(instance, regret);
    let theta_star = instance.theta_star();

    let max_degree_set = {
        let mut nodes: Vec<NodeId> = (0..graph.node_count() as NodeId).collect();
        nodes.sort_by_key(|&v| (std::cmp::Reverse(graph.out_degree(v)), v));
        nodes.truncate(seed_budget);
        nodes.sort_unstable();
        nodes
    };

    let mut split_ridge = crate::learning::ridge::RidgeEstimator::new(graph.feature_dim());
    let mut cached_kw: Option<Vec<NodeId>> = None;

    for t in 1..=horizon {
        let (seeds, theta_error): (Vec<NodeId>, Option<f64>) = match policy {
            Policy::Random => {
                let mut s: Vec<NodeId> =
                    rand::seq::index::sample(&mut rng, graph.node_count(), seed_budget)
                        .iter()
                        .map(|x| x as NodeId)
                        .collect();
                s.sort_unstable();
                (s, None)
            }
            Policy::MaxDegree => (max_degree_set.clone(), None),
            Policy::KnownWeightsGreedy => {
                let fresh = matches!(oracle_calls, OracleCalls::EveryRound) || cached_kw.is_none();
                if fresh {
                    let oracle = greedy_oracle(
                        graph,
                        &instance.weights,
                        instance.model,
                        seed_budget,
                        oracle_samples,
                        &mut rng,
                    )?;
                    cached_kw = Some(oracle.seed_set);
                }
                (cached_kw.clone().expect("cached above"), None)
            }
            Policy::SplitAttribution => {
                split_ridge.refresh()?;
                let what = sanitized_estimate_weights(graph, split_ridge.estimate(), None)?;
                let oracle = greedy_oracle(
                    graph,
                    &what,
                    instance.model,
                    seed_budget,
                    oracle_samples,
                    &mut rng,
                )?;
                (
                    oracle.seed_set,
                    Some((split_ridge.estimate() - &theta_star).norm()),
                )
            }
            Policy::ExploreExploit { .. } => {
                return Err(LtnError::Config(
                    "the explore-exploit learner runs through run_algorithm1/2".into(),
                ));
            }
        };
        let trace = realized_trace(instance, &seeds, &mut rng)?;
        if policy == Policy::SplitAttribution {
            // attribute 1/|RP| of each activation to every relevant edge;
            // nodes that stay inactive contribute nothing
            for obs in extract_feedback(graph, &trace)? {
                if !obs.activation_label {
                    continue;
                }
                let share = 1.0 / obs.relevant_parents.len() as f64;
                for &u in &obs.relevant_parents {
                    let eid = graph
                        .in_edge_ids(obs.node)
                        .iter()
                        .copied()
                        .find(|&e| graph.edge(e).0 == u)
                        .expect("relevant parent has an edge");
                    split_ridge.observe(graph.edge_feature(eid), share);
                }
            }
        }
        logger.log(t, 0, "policy", seeds, &trace, theta_error, None)?;
    }

    Ok(LearnerRun {
        policy: policy.name(),
        records: logger.records,
        snapshots: Vec::new(),
        regrets: logger.regrets,
        lambda_min_edge: 0.0,
        lambda_min_auto: 0.0,
    })
}
