//! Python bindings for the LT-N diffusion and learning toolkit.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use ltn_core::diffusion::{self, DiffusionModel, DiffusionTrace};
use ltn_core::graph::{DirectedGraph, NodeId};
use ltn_core::learning::{
    self, CoSeed, Instance, LearnerConfig, OracleCalls, Policy, RegretConfig,
};
use ltn_core::model::{DerivedWeights, ModelParams};
use ltn_core::{oracle, rng, synth};

fn err<T>(r: ltn_core::Result<T>) -> PyResult<T> {
    r.map_err(|e| PyValueError::new_err(e.to_string()))
}

fn parse_model(name: &str) -> PyResult<DiffusionModel> {
    match name {
        "lt" => Ok(DiffusionModel::Lt),
        "ltn" => Ok(DiffusionModel::Ltn),
        "tsn" => Ok(DiffusionModel::Tsn),
        other => Err(PyValueError::new_err(format!(
            "unknown model {other:?} (expected lt|ltn|tsn)"
        ))),
    }
}

#[pyclass(name = "Graph", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: DirectedGraph,
}

#[pymethods]
impl PyGraph {
    /// Builds a graph from (head, tail) pairs.
    #[new]
    fn new(node_count: usize, edges: Vec<(NodeId, NodeId)>) -> PyResult<Self> {
        Ok(Self {
            inner: err(DirectedGraph::new(node_count, edges))?,
        })
    }

    #[staticmethod]
    fn load_edge_list(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: err(DirectedGraph::load_edge_list(path))?,
        })
    }

    /// Random hub-skewed simple digraph.
    #[staticmethod]
    fn generate(node_count: usize, edge_count: usize, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: err(synth::generate_random_graph(node_count, edge_count, seed))?,
        })
    }

    /// Attaches seeded synthetic features; returns the ground-truth params.
    #[pyo3(signature = (d = 5, d_prime = 2, seed = 0))]
    fn generate_features(&mut self, d: usize, d_prime: usize, seed: u64) -> PyResult<PyParams> {
        let opts = synth::SyntheticOptions {
            d,
            d_prime,
            ..synth::SyntheticOptions::default()
        };
        let params = err(synth::generate_synthetic_features(&mut self.inner, &opts, seed))?;
        Ok(PyParams { inner: params })
    }

    fn attach_features(
        &mut self,
        edge: Vec<Vec<f64>>,
        autonomy_pos: Vec<Vec<f64>>,
        autonomy_neg: Vec<Vec<f64>>,
    ) -> PyResult<()> {
        let conv = |rows: Vec<Vec<f64>>| {
            rows.into_iter()
                .map(nalgebra::DVector::from_vec)
                .collect::<Vec<_>>()
        };
        err(self
            .inner
            .attach_features(conv(edge), conv(autonomy_pos), conv(autonomy_neg)))
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.inner.edges().to_vec()
    }

    fn in_neighbors(&self, v: NodeId) -> PyResult<Vec<NodeId>> {
        err(self.inner.check_node(v))?;
        Ok(self.inner.in_neighbors(v).collect())
    }

    fn out_neighbors(&self, v: NodeId) -> PyResult<Vec<NodeId>> {
        err(self.inner.check_node(v))?;
        Ok(self.inner.out_neighbors(v).collect())
    }

    fn edge_feature(&self, eid: u32) -> PyResult<Vec<f64>> {
        err(self.inner.check_edge(eid))?;
        Ok(self.inner.edge_feature(eid).iter().copied().collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(nodes={}, edges={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

#[pyclass(name = "ModelParams", skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: ModelParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (theta, beta, norm_bound_theta = 2.0, norm_bound_beta = 1.0))]
    fn new(theta: Vec<f64>, beta: Vec<f64>, norm_bound_theta: f64, norm_bound_beta: f64) -> Self {
        Self {
            inner: ModelParams::new(theta, beta, norm_bound_theta, norm_bound_beta),
        }
    }

    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.inner.theta.clone()
    }

    #[getter]
    fn beta(&self) -> Vec<f64> {
        self.inner.beta.clone()
    }

    fn theta_norm(&self) -> f64 {
        self.inner.theta_norm()
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(theta={:?}, beta={:?})", self.inner.theta, self.inner.beta)
    }
}

#[pyclass(name = "DerivedWeights", skip_from_py_object)]
#[derive(Clone)]
struct PyWeights {
    inner: DerivedWeights,
}

#[pymethods]
impl PyWeights {
    #[getter]
    fn edge_weight(&self) -> Vec<f64> {
        self.inner.edge_weight.clone()
    }

    #[getter]
    fn q_pos(&self) -> Vec<f64> {
        self.inner.q_pos.clone()
    }

    #[getter]
    fn q_neg(&self) -> Vec<f64> {
        self.inner.q_neg.clone()
    }

    fn belief(&self, v: NodeId) -> f64 {
        self.inner.belief(v)
    }
}

#[pyclass(name = "Trace")]
struct PyTrace {
    inner: DiffusionTrace,
}

#[pymethods]
impl PyTrace {
    #[getter]
    fn active_count(&self) -> usize {
        self.inner.active_count()
    }

    #[getter]
    fn positive_count(&self) -> usize {
        self.inner.positive_count()
    }

    #[getter]
    fn negative_count(&self) -> usize {
        self.inner.negative_count()
    }

    #[getter]
    fn last_step(&self) -> u32 {
        self.inner.last_step()
    }

    fn activation_step(&self, v: NodeId) -> Option<u32> {
        self.inner.activation_step(v)
    }

    fn sign(&self, v: NodeId) -> i8 {
        self.inner.sign(v)
    }

    /// Cumulative (active, positive, negative) node lists per step.
    fn steps<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let out = PyList::empty(py);
        for step in self.inner.steps() {
            let d = PyDict::new(py);
            d.set_item("active", step.active)?;
            d.set_item("positive", step.positive)?;
            d.set_item("negative", step.negative)?;
            out.append(d)?;
        }
        Ok(out)
    }
}

/// w(e) = <x(e), theta>, q+-(v) = <x+-(v), beta>; sanitize repairs invariant
/// violations instead of rejecting them.
#[pyfunction]
#[pyo3(signature = (graph, params, sanitize = true))]
fn derive_weights(graph: &PyGraph, params: &PyParams, sanitize: bool) -> PyResult<PyWeights> {
    Ok(PyWeights {
        inner: err(ltn_core::model::derive_weights(&graph.inner, &params.inner, sanitize))?,
    })
}

/// One cascade under lt | ltn | tsn semantics.
#[pyfunction]
fn run_cascade(
    graph: &PyGraph,
    weights: &PyWeights,
    model: &str,
    seeds: Vec<NodeId>,
    seed: u64,
) -> PyResult<PyTrace> {
    let model = parse_model(model)?;
    let mut rng = rng::stream_rng(seed, 0);
    let trace = match model {
        DiffusionModel::Lt => diffusion::run_lt(&graph.inner, &weights.inner, &seeds, &mut rng),
        DiffusionModel::Ltn => diffusion::run_ltn(&graph.inner, &weights.inner, &seeds, &mut rng),
        DiffusionModel::Tsn => diffusion::run_tsn(&graph.inner, &weights.inner, &seeds, &mut rng),
    };
    Ok(PyTrace { inner: err(trace)? })
}

/// Monte Carlo estimate of the expected spread; returns (mean, std_error).
#[pyfunction]
fn estimate_influence(
    graph: &PyGraph,
    weights: &PyWeights,
    model: &str,
    seeds: Vec<NodeId>,
    n_samples: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    let model = parse_model(model)?;
    let mut rng = rng::stream_rng(seed, 0);
    let est = err(oracle::estimate_influence(
        &graph.inner,
        &weights.inner,
        model,
        &seeds,
        n_samples,
        &mut rng,
    ))?;
    Ok((est.mean, est.std_error))
}

/// Exact expected positive spread by live-edge enumeration.
#[pyfunction]
#[pyo3(signature = (graph, weights, seeds, budget = 1e8))]
fn exact_positive_influence(
    graph: &PyGraph,
    weights: &PyWeights,
    seeds: Vec<NodeId>,
    budget: f64,
) -> PyResult<f64> {
    err(oracle::exact_positive_influence(
        &graph.inner,
        &weights.inner,
        &seeds,
        budget,
    ))
}

/// Lazy-greedy seed selection; returns a dict with the set and estimates.
#[pyfunction]
#[pyo3(signature = (graph, weights, model, k, n_samples = 1000, seed = 0))]
fn greedy_oracle<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    weights: &PyWeights,
    model: &str,
    k: usize,
    n_samples: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let model = parse_model(model)?;
    let mut rng = rng::stream_rng(seed, 0);
    let result = err(oracle::greedy_oracle(
        &graph.inner,
        &weights.inner,
        model,
        k,
        n_samples,
        &mut rng,
    ))?;
    let d = PyDict::new(py);
    d.set_item("seed_set", result.seed_set)?;
    d.set_item("value", result.value_estimate.mean)?;
    d.set_item("std_error", result.value_estimate.std_error)?;
    d.set_item("alpha", result.alpha)?;
    d.set_item("gamma", result.gamma)?;
    Ok(d)
}

/// One multinomial in-neighbor sample with corrections.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn sample_live_edge_graph(
    graph: &PyGraph,
    weights: &PyWeights,
    seed: u64,
) -> PyResult<(Vec<Option<NodeId>>, Vec<Option<i8>>)> {
    let mut rng = rng::stream_rng(seed, 0);
    let sample = diffusion::sample_live_edge_graph(&graph.inner, &weights.inner, &mut rng);
    Ok((sample.chosen_in_neighbor, sample.correction))
}

/// Probability that a freshly activated node turns positive.
#[pyfunction]
fn positive_turn_probability(q_pos: f64, q_neg: f64, recent_positive: f64, recent_total: f64) -> f64 {
    diffusion::positive_turn_probability(q_pos, q_neg, recent_positive, recent_total)
}

/// Greedy feature-diverse exploration sets; returns (edge_ids, node_ids).
#[pyfunction]
fn select_exploration_sets(
    graph: &PyGraph,
    d: usize,
    d_prime: usize,
) -> PyResult<(Vec<u32>, Vec<NodeId>)> {
    err(learning::select_exploration_sets(&graph.inner, d, d_prime))
}

#[pyfunction]
fn compute_scaled_regret(f_star: f64, policy_value: f64, alpha: f64, gamma: f64) -> PyResult<f64> {
    err(learning::compute_scaled_regret(f_star, policy_value, alpha, gamma))
}

/// First round index t_k of epoch k under the (d, d', q) schedule.
#[pyfunction]
fn schedule_first_round(d: usize, d_prime: usize, q: u32, k: u32) -> PyResult<u64> {
    let s = err(learning::EpochSchedule::new(d, d_prime, q))?;
    Ok(s.first_round(k))
}

fn run_to_dict<'py>(py: Python<'py>, run: &learning::LearnerRun) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("policy", &run.policy)?;
    d.set_item(
        "round",
        run.records.iter().map(|r| r.round).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "epoch",
        run.records.iter().map(|r| r.epoch).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "phase",
        run.records.iter().map(|r| r.phase.clone()).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "reward",
        run.records.iter().map(|r| r.reward).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "cumulative_reward",
        run.records
            .iter()
            .map(|r| r.cumulative_reward)
            .collect::<Vec<_>>(),
    )?;
    d.set_item(
        "theta_error",
        run.records.iter().map(|r| r.theta_error).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "beta_error",
        run.records.iter().map(|r| r.beta_error).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "scaled_regret",
        run.records
            .iter()
            .map(|r| r.scaled_regret)
            .collect::<Vec<_>>(),
    )?;
    d.set_item(
        "lambda_min_m",
        run.snapshots
            .iter()
            .map(|s| s.lambda_min_m)
            .collect::<Vec<_>>(),
    )?;
    d.set_item("lambda_min_edge", run.lambda_min_edge)?;
    Ok(d)
}

/// Runs one policy for `horizon` rounds on a ground-truth instance and
/// returns columnar per-round records. `policy` is one of rdm, bgg_dgr,
/// grd_kw, grd_splt, or grd_explr_q=N.
#[pyfunction]
#[pyo3(signature = (graph, params, model, policy, horizon, seed_budget = 5,
                    d = 5, d_prime = 2, oracle_samples = 300, seed = 0,
                    use_exploitation_feedback = true, coseed_degree = 4,
                    f_star = None))]
#[allow(clippy::too_many_arguments)]
fn run_policy<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    params: &PyParams,
    model: &str,
    policy: &str,
    horizon: u64,
    seed_budget: usize,
    d: usize,
    d_prime: usize,
    oracle_samples: usize,
    seed: u64,
    use_exploitation_feedback: bool,
    coseed_degree: usize,
    f_star: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let model = parse_model(model)?;
    let instance = err(Instance::new(graph.inner.clone(), params.inner.clone(), model))?;
    let policy = err(Policy::parse(policy))?;
    let regret = f_star.map(|f| RegretConfig::new(f, learning::FStarMethod::GreedyMc, 300, seed));
    let run = match policy {
        Policy::ExploreExploit { q } => {
            let node_rounds = if model == DiffusionModel::Lt { 0 } else { d_prime };
            let mut config = err(LearnerConfig::for_graph(
                &instance.graph,
                d,
                node_rounds,
                seed_budget,
                q,
            ))?;
            config.oracle_samples = oracle_samples;
            config.use_exploitation_feedback = use_exploitation_feedback;
            config.coseed = if coseed_degree == 0 {
                CoSeed::None
            } else {
                CoSeed::MaxDegree(coseed_degree)
            };
            match model {
                DiffusionModel::Lt => err(learning::run_algorithm1(
                    &instance,
                    &config,
                    horizon,
                    regret.as_ref(),
                    seed,
                ))?,
                _ => err(learning::run_algorithm2(
                    &instance,
                    &config,
                    horizon,
                    regret.as_ref(),
                    seed,
                ))?,
            }
        }
        baseline => err(learning::run_baseline(
            &instance,
            baseline,
            seed_budget,
            oracle_samples,
            OracleCalls::OncePerEpoch,
            horizon,
            regret.as_ref(),
            seed,
        ))?,
    };
    run_to_dict(py, &run)
}

#[pymodule]
fn ltn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyWeights>()?;
    m.add_class::<PyTrace>()?;
    m.add_function(wrap_pyfunction!(derive_weights, m)?)?;
    m.add_function(wrap_pyfunction!(run_cascade, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_influence, m)?)?;
    m.add_function(wrap_pyfunction!(exact_positive_influence, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(sample_live_edge_graph, m)?)?;
    m.add_function(wrap_pyfunction!(positive_turn_probability, m)?)?;
    m.add_function(wrap_pyfunction!(select_exploration_sets, m)?)?;
    m.add_function(wrap_pyfunction!(compute_scaled_regret, m)?)?;
    m.add_function(wrap_pyfunction!(schedule_first_round, m)?)?;
    m.add_function(wrap_pyfunction!(run_policy, m)?)?;
    Ok(())
}
