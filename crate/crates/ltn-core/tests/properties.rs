//! Property tests over random instances: sanitization, sign probabilities,
//! schedule partitioning, trace invariants, and feedback extraction checked
//! against independent recomputations.

use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ltn_core::diffusion::{run_ltn, run_tsn, sample_live_edge_graph};
use ltn_core::feedback::extract_feedback;
use ltn_core::graph::{DirectedGraph, NodeId};
use ltn_core::learning::EpochSchedule;
use ltn_core::model::{derive_weights, ModelParams};
use ltn_core::synth::generate_random_graph;
use ltn_core::verify::random_valid_weights;

fn arb_graph(max_nodes: usize) -> impl Strategy<Value = DirectedGraph> {
    (2usize..=max_nodes, any::<u64>()).prop_map(|(n, seed)| {
        let max_edges = (n * (n - 1)).min(4 * n);
        let m = 1 + (seed as usize) % max_edges;
        generate_random_graph(n, m, seed).expect("graph")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Sanitized weights satisfy every invariant for arbitrary features and
    /// parameters, and sanitizing twice changes nothing.
    #[test]
    fn sanitization_always_repairs(
        graph in arb_graph(12),
        theta in prop::collection::vec(-1.0f64..1.5, 3),
        beta in prop::collection::vec(-1.0f64..1.5, 2),
        feature_seed in any::<u64>(),
    ) {
        let mut graph = graph;
        let mut rng = ChaCha8Rng::seed_from_u64(feature_seed);
        use rand::Rng;
        let edge_features = (0..graph.edge_count())
            .map(|_| DVector::from_fn(3, |_, _| rng.random_range(-0.5..1.0)))
            .collect();
        let pos = (0..graph.node_count())
            .map(|_| DVector::from_fn(2, |_, _| rng.random_range(-0.5..1.0)))
            .collect();
        let neg = (0..graph.node_count())
            .map(|_| DVector::from_fn(2, |_, _| rng.random_range(-0.5..1.0)))
            .collect();
        graph.attach_features(edge_features, pos, neg).unwrap();
        let params = ModelParams::new(theta, beta, f64::INFINITY, f64::INFINITY);
        let weights = derive_weights(&graph, &params, true).unwrap();
        prop_assert!(weights.validate(&graph).is_ok());
        // idempotence through the feature route: weights already valid
        for v in 0..graph.node_count() as NodeId {
            let sum: f64 = graph
                .in_edge_ids(v)
                .iter()
                .map(|&e| weights.edge_weight[e as usize])
                .sum();
            prop_assert!(sum <= 1.0 + 1e-9);
            prop_assert!(weights.belief(v) <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn sign_probability_within_unit_interval(
        q_pos in 0.0f64..=1.0,
        mix in 0.0f64..=1.0,
        frac in 0.0f64..=1.0,
        total in 1e-9f64..=1.0,
    ) {
        let q_neg = (1.0 - q_pos) * mix;
        let p = ltn_core::diffusion::positive_turn_probability(
            q_pos, q_neg, frac * total, total,
        );
        prop_assert!((0.0..=1.0).contains(&p));
    }

    /// Epochs partition rounds 1..T without gaps or overlaps, and the first
    /// round matches the direct sum t_k = 1 + sum_{m<k}(d + d' + m^q).
    #[test]
    fn schedule_partitions_rounds(
        d in 1usize..=6,
        d_prime in 0usize..=3,
        q in 1u32..=3,
        epochs in 1u32..=8,
    ) {
        let s = EpochSchedule::new(d, d_prime, q).unwrap();
        for k in 1..=epochs {
            let direct: u64 = 1 + (1..k)
                .map(|m| (d + d_prime) as u64 + (m as u64).pow(q))
                .sum::<u64>();
            prop_assert_eq!(s.first_round(k), direct);
        }
        let horizon = s.final_round_of(epochs);
        let mut last_epoch = 0u32;
        let mut seen = 0u64;
        for rp in s.phases(horizon) {
            prop_assert!(rp.epoch == last_epoch || rp.epoch == last_epoch + 1);
            last_epoch = rp.epoch;
            seen += 1;
        }
        prop_assert_eq!(seen, horizon);
        prop_assert_eq!(last_epoch, epochs);
    }

    /// Every cascade trace satisfies the structural invariants, under both
    /// the threshold and the live-edge processes.
    #[test]
    fn cascade_traces_satisfy_invariants(
        graph in arb_graph(50),
        seed in any::<u64>(),
        k in 0usize..=4,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = random_valid_weights(&graph, &mut rng);
        let n = graph.node_count();
        let mut seeds: Vec<NodeId> = rand::seq::index::sample(&mut rng, n, k.min(n))
            .iter()
            .map(|x| x as NodeId)
            .collect();
        seeds.sort_unstable();
        let t1 = run_ltn(&graph, &weights, &seeds, &mut rng).unwrap();
        t1.check_invariants(&graph).unwrap();
        let t2 = run_tsn(&graph, &weights, &seeds, &mut rng).unwrap();
        t2.check_invariants(&graph).unwrap();
        // step sets: signs partition the active set at every step
        for step in t1.steps() {
            prop_assert_eq!(step.positive.len() + step.negative.len(), step.active.len());
        }
    }

    /// Live-edge samples have in-degree at most one and define corrections
    /// exactly on chosen edges.
    #[test]
    fn live_edge_samples_are_functional(
        graph in arb_graph(30),
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = random_valid_weights(&graph, &mut rng);
        let sample = sample_live_edge_graph(&graph, &weights, &mut rng);
        for v in 0..graph.node_count() {
            if let Some(u) = sample.chosen_in_neighbor[v] {
                prop_assert!(graph.in_neighbors(v as NodeId).any(|x| x == u));
                prop_assert!(sample.correction[v].is_some());
            } else {
                prop_assert!(sample.correction[v].is_none());
            }
        }
    }

    /// Relevant parents recomputed naively from the trace match the
    /// extractor: activated in-neighbors strictly before an activated node,
    /// all ever-activated in-neighbors for a never-activated node.
    #[test]
    fn relevant_parents_match_definition(
        graph in arb_graph(25),
        seed in any::<u64>(),
    ) {
        let mut graph = graph;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let d = 2;
        let edge_features = (0..graph.edge_count())
            .map(|_| DVector::from_fn(d, |_, _| rng.random_range(0.0..0.4)))
            .collect();
        let zero = vec![DVector::zeros(1); graph.node_count()];
        graph.attach_features(edge_features, zero.clone(), zero).unwrap();
        let weights = random_valid_weights(&graph, &mut rng);
        let n = graph.node_count();
        let mut seeds: Vec<NodeId> = rand::seq::index::sample(&mut rng, n, 2.min(n))
            .iter()
            .map(|x| x as NodeId)
            .collect();
        seeds.sort_unstable();
        let trace = run_ltn(&graph, &weights, &seeds, &mut rng).unwrap();
        let observations = extract_feedback(&graph, &trace).unwrap();
        let mut seen = std::collections::HashSet::new();
        for obs in &observations {
            seen.insert(obs.node);
            prop_assert!(seeds.binary_search(&obs.node).is_err());
            let expected: Vec<NodeId> = graph
                .in_neighbors(obs.node)
                .filter(|&u| match (trace.activation_step(u), trace.activation_step(obs.node)) {
                    (Some(us), Some(vs)) => us < vs,
                    (Some(_), None) => true,
                    (None, _) => false,
                })
                .collect();
            let mut expected_sorted = expected;
            expected_sorted.sort_unstable();
            prop_assert_eq!(&obs.relevant_parents, &expected_sorted);
            // aggregated feature is the sum of the relevant edge features
            let mut agg = DVector::zeros(d);
            for &eid in graph.in_edge_ids(obs.node) {
                if obs.relevant_parents.binary_search(&graph.edge(eid).0).is_ok() {
                    agg += graph.edge_feature(eid);
                }
            }
            prop_assert!((agg - &obs.aggregated_feature).norm() < 1e-12);
            prop_assert_eq!(obs.activation_label, trace.activation_step(obs.node).is_some());
        }
        // observedness: exactly the non-seeds with an activated in-neighbor
        for v in 0..n as NodeId {
            if seeds.binary_search(&v).is_ok() {
                continue;
            }
            let observed = graph
                .in_neighbors(v)
                .any(|u| trace.activation_step(u).is_some());
            prop_assert_eq!(seen.contains(&v), observed);
        }
    }
}
