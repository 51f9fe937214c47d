//! Node-level feedback extraction: which nodes were observed in a round,
//! their relevant parents, aggregated features, and labels.
//!
//! Observation steps are counted from the seeding: seeds sit at step 0 and
//! the first diffusion wave is step 1, one less than the trace's internal
//! numbering (where the seed set occupies step 1).

use std::io::Write;

use nalgebra::DVector;

use crate::diffusion::DiffusionTrace;
use crate::error::{LtnError, Result};
use crate::graph::{DirectedGraph, EdgeId, NodeId};

/// Feedback record for one observed non-seed node in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundObservation {
    pub node: NodeId,
    /// In-neighbors relevant to this node's status, sorted by id.
    pub relevant_parents: Vec<NodeId>,
    /// Sum of the edge features from the relevant parents.
    pub aggregated_feature: DVector<f64>,
    /// y: 1 iff the node activated this round.
    pub activation_label: bool,
    /// y+: present iff activated; 1 iff the activation was positive.
    pub positive_label: Option<bool>,
    /// Activation step counted from the seeding (seeds = 0); None if never.
    pub activation_step: Option<u32>,
    /// Activated at step 1, i.e. in the first diffusion wave.
    pub step1: bool,
}

fn check_trace(graph: &DirectedGraph, trace: &DiffusionTrace) -> Result<()> {
    if graph.node_count() != trace.node_count() {
        return Err(LtnError::TraceMismatch(format!(
            "trace over {} nodes, graph has {}",
            trace.node_count(),
            graph.node_count()
        )));
    }
    if graph.edge_count() > 0 && !graph.has_features() {
        return Err(LtnError::Config(
            "feedback extraction needs edge features".into(),
        ));
    }
    Ok(())
}

/// One record per observed non-seed node. A node is observed iff at least
/// one of its in-neighbors activated in the round; seed nodes are excluded
/// (their activation is chosen, not observed). For an activated node the
/// relevant parents are the in-neighbors activated strictly earlier; for a
/// never-activated node they are all in-neighbors that ever activated.
pub fn extract_feedback(
    graph: &DirectedGraph,
    trace: &DiffusionTrace,
) -> Result<Vec<RoundObservation>> {
    check_trace(graph, trace)?;
    let seeds = trace.seed_set();
    let d = graph.feature_dim();
    let mut out = Vec::new();
    for v in 0..graph.node_count() as NodeId {
        if seeds.binary_search(&v).is_ok() {
            continue;
        }
        let v_step = trace.activation_step(v);
        let mut parents = Vec::new();
        let mut aggregated = DVector::zeros(d);
        let mut observed = false;
        for &eid in graph.in_edge_ids(v) {
            let u = graph.edge(eid).0;
            let Some(u_step) = trace.activation_step(u) else {
                continue;
            };
            observed = true;
            let relevant = match v_step {
                Some(vs) => u_step < vs,
                None => true,
            };
            if relevant {
                parents.push(u);
                aggregated += graph.edge_feature(eid);
            }
        }
        if !observed {
            continue;
        }
        parents.sort_unstable();
        let activated = v_step.is_some();
        let obs_step = v_step.map(|s| s - 1);
        out.push(RoundObservation {
            node: v,
            relevant_parents: parents,
            aggregated_feature: aggregated,
            activation_label: activated,
            positive_label: activated.then(|| trace.sign(v) > 0),
            activation_step: obs_step,
            step1: obs_step == Some(1),
        });
    }
    Ok(out)
}

/// The special record for an exploration edge's tail: the aggregated feature
/// is exactly the edge feature and the label is the step-1 activation
/// indicator. Requires the round to have been seeded with the edge's head
/// (plus optionally co-seeds, none of which may point at the tail).
pub fn extract_exploration_edge_feedback(
    graph: &DirectedGraph,
    trace: &DiffusionTrace,
    exploration_edge: EdgeId,
) -> Result<RoundObservation> {
    check_trace(graph, trace)?;
    graph.check_edge(exploration_edge)?;
    let (head, tail) = graph.edge(exploration_edge);
    let seeds = trace.seed_set();
    if seeds.binary_search(&head).is_err() {
        return Err(LtnError::Config(format!(
            "exploration round must seed the edge head {head}"
        )));
    }
    if seeds.binary_search(&tail).is_ok() {
        return Err(LtnError::Config(format!(
            "exploration edge tail {tail} must not be seeded"
        )));
    }
    for &s in seeds {
        if s != head && graph.out_neighbors(s).any(|t| t == tail) {
            return Err(LtnError::Config(format!(
                "co-seed {s} points at the exploration tail {tail}"
            )));
        }
    }
    let obs_step = trace.activation_step(tail).map(|s| s - 1);
    let step1 = obs_step == Some(1);
    let activated = obs_step.is_some();
    Ok(RoundObservation {
        node: tail,
        relevant_parents: vec![head],
        aggregated_feature: graph.edge_feature(exploration_edge).clone(),
        activation_label: step1,
        positive_label: activated.then(|| trace.sign(tail) > 0),
        activation_step: obs_step,
        step1,
    })
}

/// CSV dump: round, node, step, y, y_plus, rp_size, then the aggregated
/// feature coordinates.
pub fn write_observations_csv<W: Write>(
    writer: &mut csv::Writer<W>,
    round: u64,
    observations: &[RoundObservation],
    feature_dim: usize,
    write_header: bool,
) -> Result<()> {
    let io_err = |e: csv::Error| LtnError::Io {
        path: "observations.csv".into(),
        source: std::io::Error::other(e),
    };
    if write_header {
        let mut header = vec![
            "round".to_string(),
            "node".to_string(),
            "step".to_string(),
            "y".to_string(),
            "y_plus".to_string(),
            "rp_size".to_string(),
        ];
        header.extend((0..feature_dim).map(|i| format!("x{i}")));
        writer.write_record(&header).map_err(io_err)?;
    }
    for obs in observations {
        let mut record = vec![
            round.to_string(),
            obs.node.to_string(),
            obs.activation_step.map_or(String::new(), |s| s.to_string()),
            (obs.activation_label as u8).to_string(),
            obs.positive_label
                .map_or(String::new(), |p| (p as u8).to_string()),
            obs.relevant_parents.len().to_string(),
        ];
        record.extend(obs.aggregated_feature.iter().map(|x| x.to_string()));
        writer.write_record(&record).map_err(io_err)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{run_ltn, DiffusionModel};
    use crate::model::DerivedWeights;
    use crate::oracle::estimate_influence;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// A=0, B=1 both pointing at C=2; weights sum to 1 so C always activates
    /// one step after the seeds.
    fn merge_fixture(w1: f64, w2: f64, q_pos: f64, q_neg: f64) -> (DirectedGraph, DerivedWeights) {
        let mut g = DirectedGraph::new(3, vec![(0, 2), (1, 2)]).unwrap();
        g.attach_features(
            vec![DVector::from_vec(vec![w1]), DVector::from_vec(vec![w2])],
            vec![DVector::zeros(1); 3],
            vec![DVector::zeros(1); 3],
        )
        .unwrap();
        let w = DerivedWeights {
            edge_weight: vec![w1, w2],
            q_pos: vec![0.0, 0.0, q_pos],
            q_neg: vec![0.0, 0.0, q_neg],
        };
        (g, w)
    }

    #[test]
    fn merged_parents_are_both_relevant() {
        let (g, w) = merge_fixture(0.6, 0.4, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let trace = run_ltn(&g, &w, &[0, 1], &mut rng).unwrap();
        let obs = extract_feedback(&g, &trace).unwrap();
        assert_eq!(obs.len(), 1);
        let c = &obs[0];
        assert_eq!(c.node, 2);
        assert_eq!(c.relevant_parents, vec![0, 1]);
        assert!((c.aggregated_feature[0] - 1.0).abs() < 1e-12);
        assert!(c.activation_label);
        assert_eq!(c.activation_step, Some(1));
        assert!(c.step1);
        assert_eq!(c.positive_label, Some(true)); // all recent influencers positive, r = 0
    }

    #[test]
    fn unobserved_nodes_emit_no_record() {
        let mut g = DirectedGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        g.attach_features(
            vec![DVector::from_vec(vec![0.2]); 2],
            vec![DVector::zeros(1); 3],
            vec![DVector::zeros(1); 3],
        )
        .unwrap();
        let w = DerivedWeights {
            edge_weight: vec![0.2, 0.2],
            q_pos: vec![0.0; 3],
            q_neg: vec![0.0; 3],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let trace = run_ltn(&g, &w, &[], &mut rng).unwrap();
        assert!(extract_feedback(&g, &trace).unwrap().is_empty());
    }

    #[test]
    fn failed_activation_keeps_parent_as_relevant() {
        let (g, w) = merge_fixture(0.3, 0.0, 0.0, 0.0);
        // seed only A; C observed, activates with probability 0.3
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut saw_failure = false;
        for _ in 0..50 {
            let trace = run_ltn(&g, &w, &[0], &mut rng).unwrap();
            let obs = extract_feedback(&g, &trace).unwrap();
            let c = obs.iter().find(|o| o.node == 2).expect("C observed");
            if !c.activation_label {
                saw_failure = true;
                assert_eq!(c.relevant_parents, vec![0]);
                assert_eq!(c.activation_step, None);
                assert_eq!(c.positive_label, None);
                assert!((c.aggregated_feature[0] - 0.3).abs() < 1e-12);
            }
        }
        assert!(saw_failure);
    }

    #[test]
    fn activation_frequency_matches_linear_model() {
        // deterministic RP composition: seeds A, B; E[y] = <x_bar, theta*> = 0.8
        let (g, w) = merge_fixture(0.3, 0.5, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 20_000;
        let mut hits = 0u32;
        for _ in 0..n {
            let trace = run_ltn(&g, &w, &[0, 1], &mut rng).unwrap();
            let obs = extract_feedback(&g, &trace).unwrap();
            if obs[0].activation_label {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        let se = (0.8f64 * 0.2 / n as f64).sqrt();
        assert!((freq - 0.8).abs() < 3.0 * se + 1e-9, "freq {freq}");
    }

    #[test]
    fn step1_positive_share_matches_one_minus_negative_autonomy() {
        // all step-0 influencers are seeds: P(positive | activated at step 1)
        // = 1 - q-(v) = 0.7
        let (g, w) = merge_fixture(0.6, 0.4, 0.2, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 20_000;
        let mut activated = 0u32;
        let mut positive = 0u32;
        for _ in 0..n {
            let trace = run_ltn(&g, &w, &[0, 1], &mut rng).unwrap();
            let obs = extract_feedback(&g, &trace).unwrap();
            let c = &obs[0];
            if c.step1 {
                activated += 1;
                if c.positive_label == Some(true) {
                    positive += 1;
                }
            }
        }
        assert_eq!(activated, n); // weights sum to 1, threshold in (0,1]
        let share = positive as f64 / activated as f64;
        let se = (0.7f64 * 0.3 / activated as f64).sqrt();
        assert!((share - 0.7).abs() < 3.0 * se + 1e-9, "share {share}");
    }

    /// Exploration edge with w = 0.3: the tail's step-1 label is Bernoulli(w).
    #[test]
    fn exploration_label_frequency_matches_edge_weight() {
        let mut g = DirectedGraph::new(2, vec![(0, 1)]).unwrap();
        g.attach_features(
            vec![DVector::from_vec(vec![0.3])],
            vec![DVector::zeros(1); 2],
            vec![DVector::zeros(1); 2],
        )
        .unwrap();
        let w = DerivedWeights {
            edge_weight: vec![0.3],
            q_pos: vec![0.0; 2],
            q_neg: vec![0.0; 2],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 100_000;
        let mut hits = 0u32;
        for _ in 0..n {
            let trace = run_ltn(&g, &w, &[0], &mut rng).unwrap();
            let obs = extract_exploration_edge_feedback(&g, &trace, 0).unwrap();
            assert_eq!(obs.relevant_parents, vec![0]);
            assert!((obs.aggregated_feature[0] - 0.3).abs() < 1e-12);
            if obs.activation_label {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.3).abs() < 0.01, "freq {freq}");
    }

    #[test]
    fn late_activation_gets_label_zero() {
        // head 0 -> 1 -> 2 with unit weights; exploration edge (0, 2) has
        // weight 0, so the tail activates at step 2 but the label stays 0
        let mut g = DirectedGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        g.attach_features(
            vec![
                DVector::from_vec(vec![1.0]),
                DVector::from_vec(vec![1.0]),
                DVector::from_vec(vec![0.0]),
            ],
            vec![DVector::zeros(1); 3],
            vec![DVector::zeros(1); 3],
        )
        .unwrap();
        let w = DerivedWeights {
            edge_weight: vec![1.0, 1.0, 0.0],
            q_pos: vec![0.0; 3],
            q_neg: vec![0.0; 3],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trace = run_ltn(&g, &w, &[0], &mut rng).unwrap();
        let obs = extract_exploration_edge_feedback(&g, &trace, 2).unwrap();
        assert_eq!(obs.activation_step, Some(2));
        assert!(!obs.activation_label);
        assert!(!obs.step1);
    }

    #[test]
    fn coseed_pointing_at_tail_is_rejected() {
        let (g, w) = merge_fixture(0.6, 0.4, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let trace = run_ltn(&g, &w, &[0, 1], &mut rng).unwrap();
        // edge 0 is (0, 2); co-seed 1 also points at node 2
        assert!(extract_exploration_edge_feedback(&g, &trace, 0).is_err());
    }

    #[test]
    fn csv_dump_has_stable_schema() {
        let (g, w) = merge_fixture(0.6, 0.4, 0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trace = run_ltn(&g, &w, &[0, 1], &mut rng).unwrap();
        let obs = extract_feedback(&g, &trace).unwrap();
        let mut writer = csv::Writer::from_writer(vec![]);
        write_observations_csv(&mut writer, 3, &obs, 1, true).unwrap();
        let text = String::from_utf8(writer.into_inner().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "round,node,step,y,y_plus,rp_size,x0");
        assert_eq!(lines.next().unwrap(), "3,2,1,1,1,2,1");
    }

    #[test]
    fn estimate_and_feedback_share_trace_semantics() {
        // smoke check that the fixture spreads exactly as the enumeration says
        let (g, w) = merge_fixture(0.6, 0.4, 0.2, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let est =
            estimate_influence(&g, &w, DiffusionModel::Ltn, &[0, 1], 20_000, &mut rng).unwrap();
        // C always activates; P(positive) = 1 - q- = 0.7; mean = 2 + 0.7
        assert!((est.mean - 2.7).abs() < 4.0 * est.std_error + 1e-9);
    }
}
