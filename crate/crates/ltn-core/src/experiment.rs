//! Experiment orchestration: building instances from config, running policy
//! sweeps over repetitions, and emitting CSV result and plot-data files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diffusion::DiffusionModel;
use crate::error::{LtnError, Result};
use crate::feedback::{extract_feedback, write_observations_csv};
use crate::graph::{DirectedGraph, NodeId};
use crate::learning::{
    compute_f_star, run_algorithm1, run_algorithm2, run_baseline, CoSeed, EpochSchedule,
    FStarMethod, Instance, LearnerConfig, LearnerRun, OracleCalls, Policy, RegretConfig,
};
use crate::model::ModelParams;
use crate::oracle::{estimate_influence, greedy_oracle};
use crate::rng::{derive_seed, stream_rng};
use crate::synth::{generate_random_graph, generate_synthetic_features, SyntheticOptions};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> LtnError + '_ {
    move |source| LtnError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> LtnError + '_ {
    move |e| LtnError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e),
    }
}

/// Sidecar files accompanying an edge-list graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureFiles {
    pub edge: String,
    pub autonomy_pos: String,
    pub autonomy_neg: String,
    /// JSON document with theta/beta arrays (the ground truth).
    pub params: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphSource {
    /// Load an edge list; generate synthetic features unless sidecar files
    /// are given.
    Path {
        edges: String,
        #[serde(default)]
        features: Option<FeatureFiles>,
    },
    Generate {
        nodes: usize,
        edges: usize,
    },
}

fn default_d() -> usize {
    5
}
fn default_d_prime() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureSpec {
    #[serde(default = "default_d")]
    pub d: usize,
    #[serde(default = "default_d_prime")]
    pub d_prime: usize,
    /// Defaults to a stream derived from the top-level seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self {
            d: default_d(),
            d_prime: default_d_prime(),
            seed: None,
        }
    }
}

/// Everything needed to realize a simulation environment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub graph: GraphSource,
    #[serde(default)]
    pub features: FeatureSpec,
    pub model: DiffusionModel,
}

impl InstanceSpec {
    pub fn build(&self, base_seed: u64) -> Result<Instance> {
        let feature_seed = self.features.seed.unwrap_or(derive_seed(base_seed, 0xFEA7));
        let (graph, params) = match &self.graph {
            GraphSource::Generate { nodes, edges } => {
                let mut graph = generate_random_graph(*nodes, *edges, derive_seed(base_seed, 0x94AF))?;
                let opts = SyntheticOptions {
                    d: self.features.d,
                    d_prime: self.features.d_prime,
                    ..SyntheticOptions::default()
                };
                let params = generate_synthetic_features(&mut graph, &opts, feature_seed)?;
                (graph, params)
            }
            GraphSource::Path { edges, features } => {
                let mut graph = DirectedGraph::load_edge_list(edges)?;
                match features {
                    Some(files) => {
                        let edge = DirectedGraph::load_feature_file(&files.edge)?;
                        let pos = DirectedGraph::load_feature_file(&files.autonomy_pos)?;
                        let neg = DirectedGraph::load_feature_file(&files.autonomy_neg)?;
                        graph.attach_features(edge, pos, neg)?;
                        let params = ModelParams::load_json(&files.params)?;
                        (graph, params)
                    }
                    None => {
                        let opts = SyntheticOptions {
                            d: self.features.d,
                            d_prime: self.features.d_prime,
                            ..SyntheticOptions::default()
                        };
                        let params = generate_synthetic_features(&mut graph, &opts, feature_seed)?;
                        (graph, params)
                    }
                }
            }
        };
        Instance::new(graph, params, self.model)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplorationSpec {
    /// Number of exploration edges (d rounds per epoch).
    #[serde(default = "default_d")]
    pub d: usize,
    /// Number of exploration nodes (d' rounds; only used on LT-N instances).
    #[serde(default = "default_d_prime")]
    pub d_prime: usize,
    #[serde(default = "default_coseed")]
    pub coseed: CoSeed,
}

fn default_coseed() -> CoSeed {
    CoSeed::None
}

impl Default for ExplorationSpec {
    fn default() -> Self {
        Self {
            d: default_d(),
            d_prime: default_d_prime(),
            coseed: default_coseed(),
        }
    }
}

fn default_policies() -> Vec<String> {
    vec![
        "bgg_dgr".into(),
        "rdm".into(),
        "grd_kw".into(),
        "grd_explr_q=1".into(),
        "grd_explr_q=2".into(),
        "grd_explr_q=3".into(),
        "grd_splt".into(),
    ]
}
fn default_seed_budget() -> usize {
    5
}
fn default_repetitions() -> usize {
    5
}
fn default_oracle_samples() -> usize {
    1000
}
fn default_regret_samples() -> usize {
    500
}
fn default_fstar_samples() -> usize {
    100_000
}
fn default_fstar_brute_budget() -> f64 {
    2e7
}
fn default_alpha_gamma() -> f64 {
    1.0
}
fn default_epochs() -> Option<u32> {
    Some(30)
}

/// Full multi-policy experiment description (JSON-loadable).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub instance: InstanceSpec,
    #[serde(default = "default_policies")]
    pub policies: Vec<String>,
    #[serde(default = "default_seed_budget")]
    pub seed_budget: usize,
    /// Horizon in rounds; wins over `epochs` when both are set.
    #[serde(default)]
    pub horizon: Option<u64>,
    /// Horizon expressed as q=1 epochs of the exploration schedule.
    #[serde(default = "default_epochs")]
    pub epochs: Option<u32>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_oracle_samples")]
    pub oracle_samples: usize,
    /// Monte Carlo samples per policy-value estimate; 0 disables regret
    /// accounting entirely.
    #[serde(default = "default_regret_samples")]
    pub regret_samples: usize,
    #[serde(default = "default_fstar_samples")]
    pub fstar_samples: usize,
    #[serde(default = "default_fstar_brute_budget")]
    pub fstar_brute_budget: f64,
    #[serde(default)]
    pub exploration: ExplorationSpec,
    #[serde(default)]
    pub use_exploitation_feedback: bool,
    #[serde(default = "default_alpha_gamma")]
    pub regret_alpha: f64,
    #[serde(default = "default_alpha_gamma")]
    pub regret_gamma: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(LtnError::Config("repetitions must be >= 1".into()));
        }
        if self.policies.is_empty() {
            return Err(LtnError::Config("at least one policy is required".into()));
        }
        for p in &self.policies {
            Policy::parse(p)?;
        }
        if self.horizon.is_none() && self.epochs.is_none() {
            return Err(LtnError::Config("set either horizon or epochs".into()));
        }
        Ok(())
    }

    fn node_rounds(&self) -> usize {
        match self.instance.model {
            DiffusionModel::Lt => 0,
            _ => self.exploration.d_prime,
        }
    }

    pub fn resolve_horizon(&self) -> Result<u64> {
        if let Some(t) = self.horizon {
            return Ok(t);
        }
        let epochs = self.epochs.expect("validated");
        let schedule = EpochSchedule::new(self.exploration.d, self.node_rounds(), 1)?;
        Ok(schedule.final_round_of(epochs))
    }
}

#[derive(Debug, Clone)]
pub struct PolicyRuns {
    pub policy: String,
    pub runs: Vec<LearnerRun>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub horizon: u64,
    pub f_star: Option<f64>,
    pub f_star_method: Option<FStarMethod>,
    pub policies: Vec<PolicyRuns>,
}

fn policy_rep_seed(base: u64, policy: &str, rep: usize) -> u64 {
    policy
        .bytes()
        .fold(derive_seed(base, rep as u64 + 1), |acc, b| {
            derive_seed(acc, b as u64)
        })
}

/// Runs every (policy, repetition) pair; repetitions execute in parallel
/// with seeds derived from the top-level seed, so results do not depend on
/// scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let instance = config.instance.build(config.seed)?;
    let horizon = config.resolve_horizon()?;

    let regret = if config.regret_samples > 0 {
        let (f_star, method) = compute_f_star(
            &instance,
            config.seed_budget,
            config.fstar_brute_budget,
            config.fstar_samples,
            derive_seed(config.seed, 0xF57A),
        )?;
        let mut rc = RegretConfig::new(
            f_star,
            method,
            config.regret_samples,
            derive_seed(config.seed, 0x4E67),
        );
        rc.alpha = config.regret_alpha;
        rc.gamma = config.regret_gamma;
        Some(rc)
    } else {
        None
    };

    let needs_learner = config
        .policies
        .iter()
        .any(|p| p.starts_with("grd_explr_q="));
    let learner_template = if needs_learner {
        let mut cfg = LearnerConfig::for_graph(
            &instance.graph,
            config.exploration.d,
            config.node_rounds(),
            config.seed_budget,
            1,
        )?;
        cfg.use_exploitation_feedback = config.use_exploitation_feedback;
        cfg.coseed = config.exploration.coseed;
        cfg.oracle_samples = config.oracle_samples;
        Some(cfg)
    } else {
        None
    };

    let jobs: Vec<(String, usize)> = config
        .policies
        .iter()
        .flat_map(|p| (0..config.repetitions).map(move |r| (p.clone(), r)))
        .collect();
    let runs: Vec<(String, usize, LearnerRun)> = jobs
        .into_par_iter()
        .map(|(policy_name, rep)| -> Result<(String, usize, LearnerRun)> {
            let policy = Policy::parse(&policy_name)?;
            let run_seed = policy_rep_seed(config.seed, &policy_name, rep);
            let run = match policy {
                Policy::ExploreExploit { q } => {
                    let mut cfg = learner_template.clone().expect("learner template built");
                    cfg.q = q;
                    match instance.model {
                        DiffusionModel::Lt => {
                            run_algorithm1(&instance, &cfg, horizon, regret.as_ref(), run_seed)?
                        }
                        _ => run_algorithm2(&instance, &cfg, horizon, regret.as_ref(), run_seed)?,
                    }
                }
                baseline => run_baseline(
                    &instance,
                    baseline,
                    config.seed_budget,
                    config.oracle_samples,
                    OracleCalls::OncePerEpoch,
                    horizon,
                    regret.as_ref(),
                    run_seed,
                )?,
            };
            Ok((policy_name, rep, run))
        })
        .collect::<Result<_>>()?;

    let mut by_policy: BTreeMap<String, Vec<(usize, LearnerRun)>> = BTreeMap::new();
    for (policy, rep, run) in runs {
        by_policy.entry(policy).or_default().push((rep, run));
    }
    let mut policies = Vec::new();
    for name in &config.policies {
        let mut reps = by_policy.remove(name).unwrap_or_default();
        reps.sort_by_key(|(r, _)| *r);
        policies.push(PolicyRuns {
            policy: name.clone(),
            runs: reps.into_iter().map(|(_, run)| run).collect(),
        });
    }

    Ok(ExperimentOutcome {
        horizon,
        f_star: regret.as_ref().map(|r| r.f_star),
        f_star_method: regret.as_ref().map(|r| r.f_star_method),
        policies,
    })
}

/// Per-round mean over repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedRow {
    pub round: u64,
    pub reward: f64,
    pub cumulative_reward: f64,
    pub scaled_regret: Option<f64>,
    pub theta_error: Option<f64>,
    pub beta_error: Option<f64>,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for v in values {
        sum += v?;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

pub fn aggregate_runs(runs: &[LearnerRun]) -> Vec<AggregatedRow> {
    let horizon = runs.iter().map(|r| r.records.len()).min().unwrap_or(0);
    (0..horizon)
        .map(|i| {
            let rows = runs.iter().map(|r| &r.records[i]);
            AggregatedRow {
                round: i as u64 + 1,
                reward: rows.clone().map(|r| r.reward as f64).sum::<f64>() / runs.len() as f64,
                cumulative_reward: rows.clone().map(|r| r.cumulative_reward as f64).sum::<f64>()
                    / runs.len() as f64,
                scaled_regret: mean_of(rows.clone().map(|r| r.scaled_regret)),
                theta_error: mean_of(rows.clone().map(|r| r.theta_error)),
                beta_error: mean_of(rows.clone().map(|r| r.beta_error)),
            }
        })
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

pub fn write_run_csv(path: &Path, policy: &str, run: &LearnerRun) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record([
        "round",
        "epoch",
        "phase",
        "policy",
        "reward",
        "cumulative_reward",
        "scaled_regret",
        "theta_error",
        "beta_error",
    ])
    .map_err(csv_err(path))?;
    for r in &run.records {
        w.write_record([
            r.round.to_string(),
            r.epoch.to_string(),
            r.phase.clone(),
            policy.to_string(),
            r.reward.to_string(),
            r.cumulative_reward.to_string(),
            fmt_opt(r.scaled_regret),
            fmt_opt(r.theta_error),
            fmt_opt(r.beta_error),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn write_mean_csv(path: &Path, policy: &str, rows: &[AggregatedRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record([
        "round",
        "policy",
        "reward",
        "cumulative_reward",
        "scaled_regret",
        "theta_error",
        "beta_error",
    ])
    .map_err(csv_err(path))?;
    for r in rows {
        w.write_record([
            r.round.to_string(),
            policy.to_string(),
            r.reward.to_string(),
            r.cumulative_reward.to_string(),
            fmt_opt(r.scaled_regret),
            fmt_opt(r.theta_error),
            fmt_opt(r.beta_error),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn write_plot_csv(
    path: &Path,
    policies: &[(String, Vec<AggregatedRow>)],
    pick: impl Fn(&AggregatedRow) -> Option<f64>,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header = vec!["round".to_string()];
    header.extend(policies.iter().map(|(p, _)| p.clone()));
    w.write_record(&header).map_err(csv_err(path))?;
    let horizon = policies.iter().map(|(_, rows)| rows.len()).min().unwrap_or(0);
    for i in 0..horizon {
        let mut record = vec![(i + 1).to_string()];
        for (_, rows) in policies {
            record.push(fmt_opt(pick(&rows[i])));
        }
        w.write_record(&record).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Writes per-repetition CSVs, per-policy means, plot-data files, and a
/// metadata JSON. Returns the paths written.
pub fn write_experiment_outputs(
    config: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();
    let mut aggregated: Vec<(String, Vec<AggregatedRow>)> = Vec::new();
    for pr in &outcome.policies {
        for (rep, run) in pr.runs.iter().enumerate() {
            let path = out_dir.join(format!("{}_rep{rep}.csv", pr.policy));
            write_run_csv(&path, &pr.policy, run)?;
            written.push(path);
        }
        let rows = aggregate_runs(&pr.runs);
        let path = out_dir.join(format!("{}_mean.csv", pr.policy));
        write_mean_csv(&path, &pr.policy, &rows)?;
        written.push(path);
        aggregated.push((pr.policy.clone(), rows));
    }
    let reward_plot = out_dir.join("plot_cumulative_reward.csv");
    write_plot_csv(&reward_plot, &aggregated, |r| Some(r.cumulative_reward))?;
    written.push(reward_plot);
    let theta_plot = out_dir.join("plot_theta_error.csv");
    let with_theta: Vec<(String, Vec<AggregatedRow>)> = aggregated
        .iter()
        .filter(|(_, rows)| rows.iter().any(|r| r.theta_error.is_some()))
        .cloned()
        .collect();
    write_plot_csv(&theta_plot, &with_theta, |r| r.theta_error)?;
    written.push(theta_plot);

    let meta = out_dir.join("experiment_meta.json");
    let doc = serde_json::json!({
        "seed": config.seed,
        "horizon": outcome.horizon,
        "policies": config.policies,
        "repetitions": config.repetitions,
        "f_star": outcome.f_star,
        "f_star_method": outcome.f_star_method,
    });
    std::fs::write(&meta, serde_json::to_string_pretty(&doc).expect("json"))
        .map_err(io_err(&meta))?;
    written.push(meta);
    Ok(written)
}

// ---------------------------------------------------------------------------
// simulate / greedy commands
// ---------------------------------------------------------------------------

fn default_cascades() -> usize {
    1000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub instance: InstanceSpec,
    pub seeds: Vec<NodeId>,
    #[serde(default = "default_cascades")]
    pub cascades: usize,
    /// Also dump per-round node-level observations.
    #[serde(default)]
    pub dump_observations: bool,
    #[serde(default)]
    pub seed: u64,
}

/// Runs N cascades for a fixed seed set; writes one JSON line per step to
/// traces.jsonl, optional observation CSVs, and summary statistics. Output
/// is byte-identical under a fixed seed.
pub fn cmd_simulate(config: &SimulateConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let instance = config.instance.build(config.seed)?;
    instance.graph.check_seed_set(&config.seeds)?;
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let traces_path = out_dir.join("traces.jsonl");
    let mut traces_file =
        std::io::BufWriter::new(std::fs::File::create(&traces_path).map_err(io_err(&traces_path))?);
    let obs_path = out_dir.join("observations.csv");
    let mut obs_writer = config
        .dump_observations
        .then(|| csv::Writer::from_path(&obs_path))
        .transpose()
        .map_err(csv_err(&obs_path))?;

    let mut sum = 0u64;
    let mut sumsq = 0u64;
    for i in 0..config.cascades {
        let mut rng = stream_rng(config.seed, i as u64);
        let trace = match config.instance.model {
            DiffusionModel::Lt => {
                crate::diffusion::run_lt(&instance.graph, &instance.weights, &config.seeds, &mut rng)?
            }
            DiffusionModel::Ltn => {
                crate::diffusion::run_ltn(&instance.graph, &instance.weights, &config.seeds, &mut rng)?
            }
            DiffusionModel::Tsn => {
                crate::diffusion::run_tsn(&instance.graph, &instance.weights, &config.seeds, &mut rng)?
            }
        };
        trace
            .write_jsonl(&mut traces_file, i)
            .map_err(io_err(&traces_path))?;
        if let Some(w) = obs_writer.as_mut() {
            let obs = extract_feedback(&instance.graph, &trace)?;
            write_observations_csv(w, i as u64, &obs, instance.graph.feature_dim(), i == 0)?;
        }
        let count = match config.instance.model {
            DiffusionModel::Lt => trace.active_count() as u64,
            _ => trace.positive_count() as u64,
        };
        sum += count;
        sumsq += count * count;
    }
    use std::io::Write;
    traces_file.flush().map_err(io_err(&traces_path))?;

    let n = config.cascades as f64;
    let mean = sum as f64 / n;
    let var = if config.cascades > 1 {
        ((sumsq as f64) - n * mean * mean) / (n - 1.0)
    } else {
        0.0
    };
    let summary_path = out_dir.join("summary.json");
    let summary = serde_json::json!({
        "cascades": config.cascades,
        "seed_set": config.seeds,
        "model": config.instance.model,
        "mean_spread": mean,
        "std_error": (var.max(0.0) / n).sqrt(),
        "seed": config.seed,
    });
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary).expect("json"))
        .map_err(io_err(&summary_path))?;

    let mut written = vec![traces_path, summary_path];
    if obs_writer.is_some() {
        written.push(obs_path);
    }
    Ok(written)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub instance: InstanceSpec,
    #[serde(default = "default_seed_budget")]
    pub seed_budget: usize,
    #[serde(default = "default_oracle_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Greedy seed selection under the instance's true weights; returns a JSON
/// document with the chosen set and a fresh-randomness value estimate.
pub fn cmd_greedy(config: &GreedyConfig) -> Result<serde_json::Value> {
    let instance = config.instance.build(config.seed)?;
    let mut rng = stream_rng(config.seed, 0x6EED);
    let result = greedy_oracle(
        &instance.graph,
        &instance.weights,
        instance.model,
        config.seed_budget,
        config.samples,
        &mut rng,
    )?;
    let fresh = estimate_influence(
        &instance.graph,
        &instance.weights,
        instance.model,
        &result.seed_set,
        config.samples,
        &mut rng,
    )?;
    Ok(serde_json::json!({
        "seed_set": result.seed_set,
        "crn_value": result.value_estimate.mean,
        "value_mean": fresh.mean,
        "value_std_error": fresh.std_error,
        "n_samples": fresh.n_samples,
        "alpha": result.alpha,
        "gamma": result.gamma,
    }))
}
