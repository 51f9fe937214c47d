//! Cascade execution under classical LT, negativity-aware LT-N, and the
//! live-edge-equivalent TS-N process.
//!
//! Step numbering follows the diffusion definition: `A_0` is empty, the seed
//! set becomes positive at step 1, and non-seed activations start at step 2.
//! Thresholds are drawn from the half-open interval (0, 1], which removes the
//! measure-zero case of activation with zero incoming weight and keeps the
//! sign equation's denominator positive.
//!
//! Reproducibility contract: every cascade consumes one seedable stream;
//! per-node draws happen in increasing node-id order (thresholds up front,
//! sign draws in id order within each step).

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LtnError, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::model::DerivedWeights;
use crate::rng::derive_seed;

const UNSET: u32 = u32::MAX;

/// Which cascade semantics to run. `Lt` is the classical model (signs
/// ignored, objective counts all activations); `Ltn` signs activations via
/// the autonomy/recent-influence draw; `Tsn` is the live-edge equivalent of
/// `Ltn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffusionModel {
    Lt,
    Ltn,
    Tsn,
}

impl DiffusionModel {
    /// The spread objective: total activations for LT, positive activations
    /// for the negativity-aware models.
    pub fn objective(&self, outcome: CascadeOutcome) -> u32 {
        match self {
            DiffusionModel::Lt => outcome.active,
            DiffusionModel::Ltn | DiffusionModel::Tsn => outcome.positive,
        }
    }
}

/// Probability that a node activated at some step turns positive, given its
/// autonomy factors and the positive/total weight of its most recent
/// influencers. The autonomy term `r * q+ / (q+ + q-)` collapses to `q+` when
/// `r > 0` and is taken as 0 in the 0/0 case; an empty recent window
/// contributes nothing.
pub fn positive_turn_probability(
    q_pos: f64,
    q_neg: f64,
    recent_positive_weight: f64,
    recent_total_weight: f64,
) -> f64 {
    let r = q_pos + q_neg;
    let autonomy = if r > 0.0 { q_pos } else { 0.0 };
    let frac = if recent_total_weight > 0.0 {
        recent_positive_weight / recent_total_weight
    } else {
        0.0
    };
    let p = autonomy + (1.0 - r) * frac;
    assert!(
        (-1e-12..=1.0 + 1e-12).contains(&p),
        "sign probability {p} out of [0,1] (q+={q_pos}, q-={q_neg}, recent {recent_positive_weight}/{recent_total_weight})"
    );
    p.clamp(0.0, 1.0)
}

/// Active/positive/negative node sets accumulated by the end of one step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepSets {
    pub active: Vec<NodeId>,
    pub positive: Vec<NodeId>,
    pub negative: Vec<NodeId>,
}

/// Full per-step history of one cascade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffusionTrace {
    node_count: usize,
    seeds: Vec<NodeId>,
    activation_step: Vec<u32>, // UNSET when never activated
    positive: Vec<bool>,       // meaningful only for activated nodes
    last_step: u32,
}

impl DiffusionTrace {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Sorted seed set (the nodes active at step 1).
    pub fn seed_set(&self) -> &[NodeId] {
        &self.seeds
    }

    /// Step at which `v` activated (seeds report 1), or `None` if never.
    pub fn activation_step(&self, v: NodeId) -> Option<u32> {
        let s = self.activation_step[v as usize];
        (s != UNSET).then_some(s)
    }

    /// +1 positive, -1 negative, 0 inactive.
    pub fn sign(&self, v: NodeId) -> i8 {
        if self.activation_step[v as usize] == UNSET {
            0
        } else if self.positive[v as usize] {
            1
        } else {
            -1
        }
    }

    /// Index of the last step in the history.
    pub fn last_step(&self) -> u32 {
        self.last_step
    }

    pub fn active_count(&self) -> usize {
        self.activation_step.iter().filter(|&&s| s != UNSET).count()
    }

    pub fn positive_count(&self) -> usize {
        self.activation_step
            .iter()
            .zip(&self.positive)
            .filter(|(&s, &p)| s != UNSET && p)
            .count()
    }

    pub fn negative_count(&self) -> usize {
        self.active_count() - self.positive_count()
    }

    /// Nodes that became active exactly at step `tau`, in id order.
    pub fn newly_active_at(&self, tau: u32) -> Vec<NodeId> {
        (0..self.node_count as NodeId)
            .filter(|&v| self.activation_step[v as usize] == tau)
            .collect()
    }

    /// Cumulative step sets for tau = 0..=last_step.
    pub fn steps(&self) -> Vec<StepSets> {
        let mut out = Vec::with_capacity(self.last_step as usize + 1);
        out.push(StepSets {
            active: vec![],
            positive: vec![],
            negative: vec![],
        });
        let mut active = Vec::new();
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for tau in 1..=self.last_step {
            for v in 0..self.node_count as NodeId {
                if self.activation_step[v as usize] == tau {
                    active.push(v);
                    if self.positive[v as usize] {
                        positive.push(v);
                    } else {
                        negative.push(v);
                    }
                }
            }
            active.sort_unstable();
            positive.sort_unstable();
            negative.sort_unstable();
            out.push(StepSets {
                active: active.clone(),
                positive: positive.clone(),
                negative: negative.clone(),
            });
        }
        out
    }

    /// Structural invariants of every trace; used by the fuzz suites.
    pub fn check_invariants(&self, graph: &DirectedGraph) -> Result<()> {
        if graph.node_count() != self.node_count {
            return Err(LtnError::TraceMismatch(format!(
                "trace over {} nodes, graph has {}",
                self.node_count,
                graph.node_count()
            )));
        }
        let n_minus_s = self.node_count - self.seeds.len();
        if self.last_step as usize > n_minus_s + 1 {
            return Err(LtnError::TraceMismatch(format!(
                "{} steps exceeds |V \\ S| + 1 = {}",
                self.last_step,
                n_minus_s + 1
            )));
        }
        for &s in &self.seeds {
            if self.activation_step[s as usize] != 1 || !self.positive[s as usize] {
                return Err(LtnError::TraceMismatch(format!(
                    "seed {s} not positive at step 1"
                )));
            }
        }
        for v in 0..self.node_count as NodeId {
            let step = self.activation_step[v as usize];
            if step == UNSET {
                continue;
            }
            if step == 0 {
                return Err(LtnError::TraceMismatch(format!("node {v} active at step 0")));
            }
            if step == 1 && self.seeds.binary_search(&v).is_err() {
                return Err(LtnError::TraceMismatch(format!(
                    "non-seed {v} active at step 1"
                )));
            }
            if step >= 2 {
                // a fresh activation needs an influencer activated exactly one
                // step earlier
                let has_recent = graph
                    .in_neighbors(v)
                    .any(|u| self.activation_step[u as usize] == step - 1);
                if !has_recent {
                    return Err(LtnError::TraceMismatch(format!(
                        "node {v} activated at step {step} without a step-{} in-neighbor",
                        step - 1
                    )));
                }
            }
        }
        // cumulative sets grow monotonically and partition into signs
        let steps = self.steps();
        for (tau, window) in steps.windows(2).enumerate() {
            let (prev, cur) = (&window[0], &window[1]);
            let contains = |set: &[NodeId], x: NodeId| set.binary_search(&x).is_ok();
            for &v in &prev.active {
                if !contains(&cur.active, v) {
                    return Err(LtnError::TraceMismatch(format!(
                        "active set shrank at step {}",
                        tau + 1
                    )));
                }
            }
            if cur.positive.len() + cur.negative.len() != cur.active.len() {
                return Err(LtnError::TraceMismatch(format!(
                    "signs do not partition active set at step {}",
                    tau + 1
                )));
            }
        }
        Ok(())
    }

    /// One JSON object per step: sorted node-id arrays.
    pub fn write_jsonl(&self, mut w: impl Write, cascade: usize) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct Line<'a> {
            cascade: usize,
            tau: usize,
            active: &'a [NodeId],
            positive: &'a [NodeId],
            negative: &'a [NodeId],
        }
        for (tau, step) in self.steps().iter().enumerate() {
            let line = Line {
                cascade,
                tau,
                active: &step.active,
                positive: &step.positive,
                negative: &step.negative,
            };
            serde_json::to_writer(&mut w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// One full multinomial in-neighbor sample with correction values: each node
/// chooses at most one in-neighbor, and a correction in {-1, 0, +1} is
/// defined exactly on the chosen edges (keyed here by the choosing node).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiveEdgeSample {
    pub chosen_in_neighbor: Vec<Option<NodeId>>,
    pub correction: Vec<Option<i8>>,
}

impl LiveEdgeSample {
    /// Deterministic reachability under the revelation rules: activation
    /// flows along live edges; sign is the correction value, or inherited
    /// when the correction is 0.
    pub fn realize(&self, graph: &DirectedGraph, seeds: &[NodeId]) -> (Vec<bool>, Vec<bool>) {
        let n = graph.node_count();
        let mut active = vec![false; n];
        let mut positive = vec![false; n];
        let mut frontier: Vec<NodeId> = Vec::new();
        for &s in seeds {
            if !active[s as usize] {
                active[s as usize] = true;
                positive[s as usize] = true;
                frontier.push(s);
            }
        }
        while let Some(u) = frontier.pop() {
            for v in graph.out_neighbors(u) {
                if active[v as usize] || self.chosen_in_neighbor[v as usize] != Some(u) {
                    continue;
                }
                active[v as usize] = true;
                positive[v as usize] = match self.correction[v as usize] {
                    Some(1) => true,
                    Some(-1) => false,
                    Some(0) => positive[u as usize],
                    other => unreachable!("correction {other:?} on live edge"),
                };
                frontier.push(v);
            }
        }
        (active, positive)
    }
}

/// Samples the full (non-lazy) multinomial in-neighbor choice and correction
/// values. Per-node draws run in id order: one uniform for the choice, one
/// more for the correction when an in-neighbor was chosen.
pub fn sample_live_edge_graph(
    graph: &DirectedGraph,
    weights: &DerivedWeights,
    rng: &mut impl Rng,
) -> LiveEdgeSample {
    let n = graph.node_count();
    let mut chosen = vec![None; n];
    let mut correction = vec![None; n];
    for v in 0..n as NodeId {
        let pick: f64 = rng.random();
        let mut cum = 0.0;
        for &eid in graph.in_edge_ids(v) {
            cum += weights.edge_weight[eid as usize];
            if pick < cum {
                chosen[v as usize] = Some(graph.edge(eid).0);
                break;
            }
        }
        if chosen[v as usize].is_some() {
            let c: f64 = rng.random();
            let (qp, qn) = (weights.q_pos[v as usize], weights.q_neg[v as usize]);
            let r = qp + qn;
            correction[v as usize] = Some(if c < qn {
                -1
            } else if c < qn + (1.0 - r) {
                0
            } else {
                1
            });
        }
    }
    LiveEdgeSample {
        chosen_in_neighbor: chosen,
        correction,
    }
}

/// Reusable per-cascade scratch space.
struct Workspace {
    accum: Vec<f64>,
    excluded: Vec<f64>,
    step: Vec<u32>,
    positive: Vec<bool>,
    queued: Vec<bool>,
    thresholds: Vec<f64>,
    frontier: Vec<NodeId>,
    candidates: Vec<NodeId>,
    next: Vec<NodeId>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            accum: vec![0.0; n],
            excluded: vec![0.0; n],
            step: vec![UNSET; n],
            positive: vec![false; n],
            queued: vec![false; n],
            thresholds: vec![0.0; n],
            frontier: Vec::with_capacity(n),
            candidates: Vec::with_capacity(n),
            next: Vec::with_capacity(n),
        }
    }

    fn reset(&mut self) {
        self.accum.fill(0.0);
        self.excluded.fill(0.0);
        self.step.fill(UNSET);
        self.positive.fill(false);
        self.queued.fill(false);
        self.frontier.clear();
        self.candidates.clear();
        self.next.clear();
    }
}

/// Where a cascade gets its randomness. `Fresh` draws thresholds for
/// non-seeds and sign uniforms on demand; `Banked` reads pre-drawn values so
/// evaluations share common random numbers across seed sets.
enum Randomness<'a, R: Rng> {
    Fresh(&'a mut R),
    Banked { bank: &'a CrnBank, sample: usize },
}

/// Counts-only cascade outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CascadeOutcome {
    pub active: u32,
    pub positive: u32,
    pub last_step: u32,
}

/// Cascade engine bound to one graph and one weight function. Reuses its
/// scratch buffers; cheap to call in tight Monte Carlo loops.
pub struct Simulator<'a> {
    graph: &'a DirectedGraph,
    weights: &'a DerivedWeights,
    signed: bool,
    ws: Workspace,
}

impl<'a> Simulator<'a> {
    /// LT-N semantics: activations signed via the autonomy/recent-influence
    /// draw.
    pub fn ltn(graph: &'a DirectedGraph, weights: &'a DerivedWeights) -> Self {
        Self {
            graph,
            weights,
            signed: true,
            ws: Workspace::new(graph.node_count()),
        }
    }

    /// Classical LT: same activation process, every activation positive.
    pub fn lt(graph: &'a DirectedGraph, weights: &'a DerivedWeights) -> Self {
        Self {
            graph,
            weights,
            signed: false,
            ws: Workspace::new(graph.node_count()),
        }
    }

    pub fn for_model(model: DiffusionModel, graph: &'a DirectedGraph, weights: &'a DerivedWeights) -> Self {
        match model {
            DiffusionModel::Lt => Self::lt(graph, weights),
            DiffusionModel::Ltn | DiffusionModel::Tsn => Self::ltn(graph, weights),
        }
    }

    /// Runs one cascade under the given model semantics.
    pub fn sample_model(&mut self, model: DiffusionModel, seeds: &[NodeId], rng: &mut impl Rng) -> CascadeOutcome {
        match model {
            DiffusionModel::Tsn => self.sample_tsn(seeds, rng),
            _ => self.sample(seeds, rng),
        }
    }

    fn seed_frontier(&mut self, seeds: &[NodeId]) {
        for &s in seeds {
            let idx = s as usize;
            if self.ws.step[idx] == UNSET {
                self.ws.step[idx] = 1;
                self.ws.positive[idx] = true;
                self.ws.frontier.push(s);
            }
        }
    }

    fn run_threshold_cascade<R: Rng>(&mut self, seeds: &[NodeId], mut rnd: Randomness<'_, R>) -> CascadeOutcome {
        self.ws.reset();
        self.seed_frontier(seeds);
        let ws = &mut self.ws;
        match &mut rnd {
            Randomness::Fresh(rng) => {
                // thresholds for non-seeds in id order; seeds never consult theirs
                for v in 0..self.graph.node_count() {
                    ws.thresholds[v] = if ws.step[v] == UNSET {
                        1.0 - rng.random::<f64>()
                    } else {
                        f64::INFINITY
                    };
                }
            }
            Randomness::Banked { bank, sample } => {
                for v in 0..self.graph.node_count() {
                    ws.thresholds[v] = bank.threshold(*sample, v as NodeId);
                }
            }
        }
        let mut active = ws.frontier.len() as u32;
        let mut positive = active;
        let mut tau = 1u32;
        let mut last_activation = 1u32;
        while !ws.frontier.is_empty() {
            tau += 1;
            ws.candidates.clear();
            for fi in 0..ws.frontier.len() {
                let u = ws.frontier[fi];
                for &eid in self.graph.out_edge_ids(u) {
                    let v = self.graph.edge(eid).1 as usize;
                    if ws.step[v] != UNSET {
                        continue;
                    }
                    ws.accum[v] += self.weights.edge_weight[eid as usize];
                    if ws.accum[v] >= ws.thresholds[v] && !ws.queued[v] {
                        ws.queued[v] = true;
                        ws.candidates.push(v as NodeId);
                    }
                }
            }
            ws.candidates.sort_unstable();
            for ci in 0..ws.candidates.len() {
                let v = ws.candidates[ci];
                let idx = v as usize;
                let is_positive = if self.signed {
                    let mut recent_total = 0.0;
                    let mut recent_positive = 0.0;
                    for &eid in self.graph.in_edge_ids(v) {
                        let u = self.graph.edge(eid).0 as usize;
                        if ws.step[u] == tau - 1 {
                            let w = self.weights.edge_weight[eid as usize];
                            recent_total += w;
                            if ws.positive[u] {
                                recent_positive += w;
                            }
                        }
                    }
                    debug_assert!(recent_total > 0.0, "activation without recent influence");
                    let p = positive_turn_probability(
                        self.weights.q_pos[idx],
                        self.weights.q_neg[idx],
                        recent_positive,
                        recent_total,
                    );
                    let u = match &mut rnd {
                        Randomness::Fresh(rng) => rng.random::<f64>(),
                        Randomness::Banked { bank, sample } => bank.sign_uniform(*sample, v),
                    };
                    u < p
                } else {
                    true
                };
                ws.step[idx] = tau;
                ws.positive[idx] = is_positive;
                active += 1;
                if is_positive {
                    positive += 1;
                }
            }
            if !ws.candidates.is_empty() {
                last_activation = tau;
            }
            std::mem::swap(&mut ws.frontier, &mut ws.candidates);
        }
        CascadeOutcome {
            active,
            positive,
            last_step: last_activation,
        }
    }

    /// TS-N: lazy step-wise revelation of the multinomial in-neighbor choice
    /// conditioned on prior non-selection, then the correction value on the
    /// revealed live edge. Per candidate (id order within a step): one
    /// activation uniform, then choice and correction uniforms if activated.
    fn run_tsn_cascade(&mut self, seeds: &[NodeId], rng: &mut impl Rng) -> CascadeOutcome {
        self.ws.reset();
        self.seed_frontier(seeds);
        let ws = &mut self.ws;
        let mut active = ws.frontier.len() as u32;
        let mut positive = active;
        let mut tau = 1u32;
        let mut last_activation = 1u32;
        while !ws.frontier.is_empty() {
            tau += 1;
            ws.candidates.clear();
            ws.next.clear();
            for fi in 0..ws.frontier.len() {
                let u = ws.frontier[fi];
                for &eid in self.graph.out_edge_ids(u) {
                    let v = self.graph.edge(eid).1 as usize;
                    if ws.step[v] == UNSET && !ws.queued[v] {
                        ws.queued[v] = true;
                        ws.candidates.push(v as NodeId);
                    }
                }
            }
            ws.candidates.sort_unstable();
            for ci in 0..ws.candidates.len() {
                let v = ws.candidates[ci];
                let idx = v as usize;
                ws.queued[idx] = false;
                let mut recent_w = 0.0;
                for &eid in self.graph.in_edge_ids(v) {
                    let u = self.graph.edge(eid).0 as usize;
                    if ws.step[u] == tau - 1 {
                        recent_w += self.weights.edge_weight[eid as usize];
                    }
                }
                if recent_w <= 0.0 {
                    continue;
                }
                let denom = 1.0 - ws.excluded[idx];
                debug_assert!(denom > 0.0, "conditional mass exhausted");
                let p_act = (recent_w / denom).min(1.0);
                if rng.random::<f64>() < p_act {
                    // reveal which recent in-neighbor was chosen
                    let pick = rng.random::<f64>() * recent_w;
                    let mut cum = 0.0;
                    let mut chosen: Option<usize> = None;
                    for &eid in self.graph.in_edge_ids(v) {
                        let u = self.graph.edge(eid).0 as usize;
                        if ws.step[u] == tau - 1 {
                            cum += self.weights.edge_weight[eid as usize];
                            if pick < cum {
                                chosen = Some(u);
                                break;
                            }
                        }
                    }
                    let chosen = chosen.unwrap_or_else(|| {
                        // float-edge fallback: last recent in-neighbor
                        self.graph
                            .in_edge_ids(v)
                            .iter()
                            .map(|&eid| self.graph.edge(eid).0 as usize)
                            .rfind(|&u| ws.step[u] == tau - 1)
                            .expect("recent_w > 0 implies a recent in-neighbor")
                    });
                    let c: f64 = rng.random();
                    let (qp, qn) = (self.weights.q_pos[idx], self.weights.q_neg[idx]);
                    let r = qp + qn;
                    let is_positive = if c < qn {
                        false
                    } else if c < qn + (1.0 - r) {
                        ws.positive[chosen]
                    } else {
                        true
                    };
                    ws.step[idx] = tau;
                    ws.positive[idx] = is_positive;
                    active += 1;
                    if is_positive {
                        positive += 1;
                    }
                    ws.next.push(v);
                } else {
                    ws.excluded[idx] += recent_w;
                }
            }
            if !ws.next.is_empty() {
                last_activation = tau;
            }
            std::mem::swap(&mut ws.frontier, &mut ws.next);
        }
        CascadeOutcome {
            active,
            positive,
            last_step: last_activation,
        }
    }

    pub fn sample_banked(&mut self, seeds: &[NodeId], bank: &CrnBank, sample: usize) -> CascadeOutcome {
        self.run_threshold_cascade::<rand_chacha::ChaCha8Rng>(
            seeds,
            Randomness::Banked { bank, sample },
        )
    }

    pub fn sample(&mut self, seeds: &[NodeId], rng: &mut impl Rng) -> CascadeOutcome {
        self.run_threshold_cascade(seeds, Randomness::Fresh(rng))
    }

    pub fn sample_tsn(&mut self, seeds: &[NodeId], rng: &mut impl Rng) -> CascadeOutcome {
        self.run_tsn_cascade(seeds, rng)
    }

    fn trace_from_ws(&self, seeds: &[NodeId], last_step: u32) -> DiffusionTrace {
        let mut seeds = seeds.to_vec();
        seeds.sort_unstable();
        seeds.dedup();
        DiffusionTrace {
            node_count: self.graph.node_count(),
            seeds,
            activation_step: self.ws.step.clone(),
            positive: self.ws.positive.clone(),
            last_step,
        }
    }
}

/// Classical LT cascade; all activations are signed positive so the same
/// trace type serves both models.
pub fn run_lt(
    graph: &DirectedGraph,
    weights: &DerivedWeights,
    seeds: &[NodeId],
    rng: &mut impl Rng,
) -> Result<DiffusionTrace> {
    graph.check_seed_set(seeds)?;
    let mut sim = Simulator::lt(graph, weights);
    let outcome = sim.sample(seeds, rng);
    Ok(sim.trace_from_ws(seeds, outcome.last_step))
}

/// LT-N cascade: thresholds once at cascade start, signs drawn on activation
/// from the most recent influencers.
pub fn run_ltn(
    graph: &DirectedGraph,
    weights: &DerivedWeights,
    seeds: &[NodeId],
    rng: &mut impl Rng,
) -> Result<DiffusionTrace> {
    graph.check_seed_set(seeds)?;
    let mut sim = Simulator::ltn(graph, weights);
    let outcome = sim.sample(seeds, rng);
    Ok(sim.trace_from_ws(seeds, outcome.last_step))
}

/// TS-N cascade via lazy conditional revelation; distributionally equivalent
/// to `run_ltn`.
pub fn run_tsn(
    graph: &DirectedGraph,
    weights: &DerivedWeights,
    seeds: &[NodeId],
    rng: &mut impl Rng,
) -> Result<DiffusionTrace> {
    graph.check_seed_set(seeds)?;
    let mut sim = Simulator::ltn(graph, weights);
    let outcome = sim.sample_tsn(seeds, rng);
    Ok(sim.trace_from_ws(seeds, outcome.last_step))
}

/// Pre-drawn cascade randomness: per-sample thresholds over (0,1] and sign
/// uniforms for every node, so marginal-gain evaluations inside one greedy
/// run share common random numbers. Stored as f32 to keep large banks small.
pub struct CrnBank {
    node_count: usize,
    samples: usize,
    thresholds: Vec<f32>,
    sign_uniforms: Vec<f32>,
}

impl CrnBank {
    pub fn generate(node_count: usize, samples: usize, seed: u64) -> Self {
        use rand::SeedableRng;
        let mut thresholds = vec![0.0f32; node_count * samples];
        let mut sign_uniforms = vec![0.0f32; node_count * samples];
        for i in 0..samples {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let row = i * node_count;
            for v in 0..node_count {
                thresholds[row + v] = 1.0 - rng.random::<f32>();
            }
            for v in 0..node_count {
                sign_uniforms[row + v] = rng.random::<f32>();
            }
        }
        Self {
            node_count,
            samples,
            thresholds,
            sign_uniforms,
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    #[inline]
    pub fn threshold(&self, sample: usize, v: NodeId) -> f64 {
        self.thresholds[sample * self.node_count + v as usize] as f64
    }

    #[inline]
    pub fn sign_uniform(&self, sample: usize, v: NodeId) -> f64 {
        self.sign_uniforms[sample * self.node_count + v as usize] as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// u -> v with w = 0.5, q+(v) = 0.2, q-(v) = 0.3. Exact enumeration:
    /// P(v active) = 0.5; P(positive | active) = q+ + (1 - r) * 1 = 0.7;
    /// expected positive count = 1 + 0.5 * 0.7 = 1.35.
    fn two_node_fixture() -> (DirectedGraph, DerivedWeights) {
        let g = DirectedGraph::new(2, vec![(0, 1)]).unwrap();
        let w = DerivedWeights {
            edge_weight: vec![0.5],
            q_pos: vec![0.0, 0.2],
            q_neg: vec![0.0, 0.3],
        };
        (g, w)
    }

    fn random_weights(g: &DirectedGraph, rng: &mut ChaCha8Rng) -> DerivedWeights {
        let mut edge_weight = vec![0.0; g.edge_count()];
        for v in 0..g.node_count() as NodeId {
            let ids = g.in_edge_ids(v);
            if ids.is_empty() {
                continue;
            }
            let raw: Vec<f64> = ids.iter().map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let scale = rng.random_range(0.2..1.0) / total.max(1e-12);
            for (&e, r) in ids.iter().zip(&raw) {
                edge_weight[e as usize] = r * scale;
            }
        }
        let mut q_pos = vec![0.0; g.node_count()];
        let mut q_neg = vec![0.0; g.node_count()];
        for v in 0..g.node_count() {
            let qp: f64 = rng.random_range(0.0..0.6);
            let qn: f64 = rng.random_range(0.0..(1.0 - qp));
            q_pos[v] = qp;
            q_neg[v] = qn;
        }
        DerivedWeights { edge_weight, q_pos, q_neg }
    }

    #[test]
    fn sign_probability_trivial_cases() {
        // r = 1: probability equals q+
        assert_eq!(positive_turn_probability(0.4, 0.6, 0.0, 1.0), 0.4);
        // r = 0, all recent influencers positive: probability 1
        assert_eq!(positive_turn_probability(0.0, 0.0, 0.7, 0.7), 1.0);
        // 0/0 autonomy convention with empty autonomy mass
        assert_eq!(positive_turn_probability(0.0, 0.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn empty_seed_set_terminates_immediately() {
        let (g, w) = two_node_fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for trace in [
            run_lt(&g, &w, &[], &mut rng).unwrap(),
            run_ltn(&g, &w, &[], &mut rng).unwrap(),
            run_tsn(&g, &w, &[], &mut rng).unwrap(),
        ] {
            assert_eq!(trace.active_count(), 0);
            assert_eq!(trace.last_step(), 1);
            assert_eq!(trace.steps().len(), 2);
            assert!(trace.steps()[1].active.is_empty());
            trace.check_invariants(&g).unwrap();
        }
    }

    #[test]
    fn full_seed_set_is_all_positive_at_step_one() {
        let (g, w) = two_node_fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for trace in [
            run_lt(&g, &w, &[0, 1], &mut rng).unwrap(),
            run_ltn(&g, &w, &[0, 1], &mut rng).unwrap(),
            run_tsn(&g, &w, &[0, 1], &mut rng).unwrap(),
        ] {
            assert_eq!(trace.positive_count(), 2);
            assert_eq!(trace.steps()[1].positive, vec![0, 1]);
            assert_eq!(trace.last_step(), 1);
        }
    }

    #[test]
    fn invalid_seed_rejected() {
        let (g, w) = two_node_fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(run_ltn(&g, &w, &[5], &mut rng).is_err());
    }

    #[test]
    fn lt_two_node_activation_is_bernoulli_half() {
        let (g, w) = two_node_fixture();
        let mut sim = Simulator::lt(&g, &w);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 100_000;
        let mut hits = 0u32;
        for _ in 0..n {
            let out = sim.sample(&[0], &mut rng);
            hits += out.active - 1;
        }
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn ltn_two_node_mean_positive_is_1_35() {
        let (g, w) = two_node_fixture();
        let mut sim = Simulator::ltn(&g, &w);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mut total = 0u64;
        for _ in 0..n {
            total += sim.sample(&[0], &mut rng).positive as u64;
        }
        let mean = total as f64 / n as f64;
        assert!((mean - 1.35).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn tsn_two_node_mean_positive_is_1_35() {
        let (g, w) = two_node_fixture();
        let mut sim = Simulator::ltn(&g, &w);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 100_000;
        let mut total = 0u64;
        for _ in 0..n {
            total += sim.sample_tsn(&[0], &mut rng).positive as u64;
        }
        let mean = total as f64 / n as f64;
        assert!((mean - 1.35).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn banked_cascades_match_fresh_distribution() {
        let (g, w) = two_node_fixture();
        let bank = CrnBank::generate(2, 100_000, 99);
        let mut sim = Simulator::ltn(&g, &w);
        let mut total = 0u64;
        for i in 0..bank.samples() {
            total += sim.sample_banked(&[0], &bank, i).positive as u64;
        }
        let mean = total as f64 / bank.samples() as f64;
        assert!((mean - 1.35).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn live_edge_sample_respects_multinomial_law() {
        // node 2 with in-edges of weight 0.3 (from 0) and 0.5 (from 1)
        let g = DirectedGraph::new(3, vec![(0, 2), (1, 2)]).unwrap();
        let w = DerivedWeights {
            edge_weight: vec![0.3, 0.5],
            q_pos: vec![0.0; 3],
            q_neg: vec![0.0; 3],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut counts = [0u32; 3]; // chose 0, chose 1, none
        for _ in 0..n {
            let s = sample_live_edge_graph(&g, &w, &mut rng);
            match s.chosen_in_neighbor[2] {
                Some(0) => counts[0] += 1,
                Some(1) => counts[1] += 1,
                None => counts[2] += 1,
                other => panic!("unexpected choice {other:?}"),
            }
            // nodes without in-neighbors choose nothing
            assert_eq!(s.chosen_in_neighbor[0], None);
            // corrections defined exactly on chosen edges
            assert_eq!(s.correction[2].is_some(), s.chosen_in_neighbor[2].is_some());
        }
        let f = |c: u32| c as f64 / n as f64;
        assert!((f(counts[0]) - 0.3).abs() < 0.01);
        assert!((f(counts[1]) - 0.5).abs() < 0.01);
        assert!((f(counts[2]) - 0.2).abs() < 0.01);
    }

    #[test]
    fn degenerate_single_edge_always_chosen() {
        let g = DirectedGraph::new(2, vec![(0, 1)]).unwrap();
        let w = DerivedWeights {
            edge_weight: vec![1.0],
            q_pos: vec![0.0; 2],
            q_neg: vec![0.0; 2],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let s = sample_live_edge_graph(&g, &w, &mut rng);
            assert_eq!(s.chosen_in_neighbor[1], Some(0));
        }
    }

    #[test]
    fn traces_are_reproducible_under_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = crate::synth::generate_random_graph(30, 120, 77).unwrap();
        let w = random_weights(&g, &mut rng);
        let t1 = run_ltn(&g, &w, &[0, 3, 7], &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let t2 = run_ltn(&g, &w, &[0, 3, 7], &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn trace_invariants_fuzz_over_random_graphs() {
        let mut meta = ChaCha8Rng::seed_from_u64(123);
        for case in 0..20 {
            let n = meta.random_range(2..=50);
            let max_m = (n * (n - 1)).min(4 * n);
            let m = meta.random_range(1..=max_m);
            let g = crate::synth::generate_random_graph(n, m, 1000 + case).unwrap();
            let w = random_weights(&g, &mut meta);
            for rep in 0..50 {
                let k = meta.random_range(0..=n.min(4));
                let mut seeds: Vec<NodeId> =
                    rand::seq::index::sample(&mut meta, n, k).iter().map(|x| x as NodeId).collect();
                seeds.sort_unstable();
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(case, rep));
                let t_ltn = run_ltn(&g, &w, &seeds, &mut rng).unwrap();
                t_ltn.check_invariants(&g).unwrap();
                let t_tsn = run_tsn(&g, &w, &seeds, &mut rng).unwrap();
                t_tsn.check_invariants(&g).unwrap();
                let t_lt = run_lt(&g, &w, &seeds, &mut rng).unwrap();
                t_lt.check_invariants(&g).unwrap();
                assert_eq!(t_lt.active_count(), t_lt.positive_count());
            }
        }
    }

    /// TV distance between the |A+| histograms of run_ltn and run_tsn on a
    /// small fixture; the distributional-equivalence check at module level.
    #[test]
    fn ltn_and_tsn_positive_counts_agree_in_distribution() {
        let mut meta = ChaCha8Rng::seed_from_u64(321);
        let g = crate::synth::generate_random_graph(8, 18, 555).unwrap();
        let w = random_weights(&g, &mut meta);
        let n = 40_000;
        let mut h_ltn = vec![0f64; g.node_count() + 1];
        let mut h_tsn = vec![0f64; g.node_count() + 1];
        let mut sim = Simulator::ltn(&g, &w);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..n {
            h_ltn[sim.sample(&[0, 1], &mut rng).positive as usize] += 1.0;
            h_tsn[sim.sample_tsn(&[0, 1], &mut rng).positive as usize] += 1.0;
        }
        let tv: f64 = h_ltn
            .iter()
            .zip(&h_tsn)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / (2.0 * n as f64);
        assert!(tv < 0.03, "TV distance {tv}");
    }
}
