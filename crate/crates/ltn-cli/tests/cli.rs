//! End-to-end checks of the `ltn` binary: config loading, file outputs,
//! determinism, and exit codes.

use std::path::Path;
use std::process::Command;

fn ltn() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ltn"))
}

/// Writes the two-node fixture (w = 0.5, q+(v) = 0.2, q-(v) = 0.3) as an
/// edge list plus sidecar feature files.
fn write_two_node_fixture(dir: &Path) -> serde_json::Value {
    std::fs::write(dir.join("edges.txt"), "0 1\n").unwrap();
    std::fs::write(dir.join("edge_features.txt"), "0.5\n").unwrap();
    std::fs::write(dir.join("autonomy_pos.txt"), "0.0\n0.2\n").unwrap();
    std::fs::write(dir.join("autonomy_neg.txt"), "0.0\n0.3\n").unwrap();
    std::fs::write(
        dir.join("params.json"),
        r#"{"theta": [1.0], "beta": [1.0], "norm_bound_theta": 2.0, "norm_bound_beta": 1.0}"#,
    )
    .unwrap();
    serde_json::json!({
        "graph": {
            "path": {
                "edges": dir.join("edges.txt"),
                "features": {
                    "edge": dir.join("edge_features.txt"),
                    "autonomy_pos": dir.join("autonomy_pos.txt"),
                    "autonomy_neg": dir.join("autonomy_neg.txt"),
                    "params": dir.join("params.json"),
                }
            }
        },
        "features": {"d": 1, "d_prime": 1},
        "model": "ltn",
    })
}

#[test]
fn simulate_two_node_fixture_matches_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write_two_node_fixture(dir.path());
    let config = serde_json::json!({
        "instance": instance,
        "seeds": [0],
        "cascades": 100000,
        "dump_observations": true,
        "seed": 11,
    });
    let config_path = dir.path().join("sim.json");
    std::fs::write(&config_path, config.to_string()).unwrap();

    let out1 = dir.path().join("out1");
    let status = ltn()
        .args(["simulate", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out1)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out1.join("summary.json")).unwrap()).unwrap();
    let mean = summary["mean_spread"].as_f64().unwrap();
    assert!((mean - 1.35).abs() < 0.01, "mean {mean}");
    assert!(out1.join("traces.jsonl").exists());
    assert!(out1.join("observations.csv").exists());

    // byte-identical rerun under the same seed
    let out2 = dir.path().join("out2");
    assert!(ltn()
        .args(["simulate", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out2)
        .status()
        .unwrap()
        .success());
    for name in ["traces.jsonl", "summary.json", "observations.csv"] {
        assert_eq!(
            std::fs::read(out1.join(name)).unwrap(),
            std::fs::read(out2.join(name)).unwrap(),
            "{name} not reproducible"
        );
    }
}

#[test]
fn greedy_reports_seed_set_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "instance": {
            "graph": {"generate": {"nodes": 30, "edges": 120}},
            "features": {"d": 5, "d_prime": 2},
            "model": "ltn",
        },
        "seed_budget": 3,
        "samples": 300,
        "seed": 4,
    });
    let config_path = dir.path().join("greedy.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let output = ltn()
        .args(["greedy", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(doc["seed_set"].as_array().unwrap().len(), 3);
    assert!(doc["value_mean"].as_f64().unwrap() >= 3.0);
}

#[test]
fn verify_suite_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let status = ltn()
        .args(["verify", "--suite", "greedy_ratio", "--seed", "5", "--out"])
        .arg(&report_path)
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["suites"][0]["suite"], "greedy_ratio");
}

#[test]
fn experiment_emits_per_rep_mean_and_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "instance": {
            "graph": {"generate": {"nodes": 25, "edges": 80}},
            "features": {"d": 5, "d_prime": 2},
            "model": "lt",
        },
        "policies": ["rdm", "grd_explr_q=1"],
        "seed_budget": 3,
        "horizon": 15,
        "repetitions": 2,
        "oracle_samples": 50,
        "regret_samples": 0,
        "exploration": {"d": 5, "d_prime": 0, "coseed": "none"},
        "seed": 21,
    });
    let config_path = dir.path().join("exp.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = dir.path().join("results");
    let status = ltn()
        .args(["experiment", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for name in [
        "rdm_rep0.csv",
        "rdm_rep1.csv",
        "rdm_mean.csv",
        "grd_explr_q=1_rep0.csv",
        "grd_explr_q=1_mean.csv",
        "plot_cumulative_reward.csv",
        "plot_theta_error.csv",
        "experiment_meta.json",
    ] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let mut rdr = csv::Reader::from_path(out.join("rdm_rep0.csv")).unwrap();
    assert_eq!(rdr.records().count(), 15);
    let header: Vec<String> = csv::Reader::from_path(out.join("rdm_rep0.csv"))
        .unwrap()
        .headers()
        .unwrap()
        .iter()
        .map(String::from)
        .collect();
    assert_eq!(
        header,
        vec![
            "round",
            "epoch",
            "phase",
            "policy",
            "reward",
            "cumulative_reward",
            "scaled_regret",
            "theta_error",
            "beta_error"
        ]
    );
}

#[test]
fn usage_errors_exit_with_code_2() {
    // missing config file
    let status = ltn()
        .args(["simulate", "--config", "/nonexistent/config.json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // unknown verify suite
    let status = ltn()
        .args(["verify", "--suite", "nonsense"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // learn with more than one policy
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "instance": {
            "graph": {"generate": {"nodes": 10, "edges": 20}},
            "model": "lt",
        },
        "policies": ["rdm", "bgg_dgr"],
        "horizon": 3,
        "repetitions": 1,
        "regret_samples": 0,
    });
    let config_path = dir.path().join("learn.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let status = ltn()
        .args(["learn", "--config"])
        .arg(&config_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn learn_writes_snapshots_for_scheduled_policies() {
    let dir = tempfile::tempdir().unwrap();
    let config = serde_json::json!({
        "instance": {
            "graph": {"generate": {"nodes": 25, "edges": 80}},
            "features": {"d": 3, "d_prime": 2},
            "model": "lt",
        },
        "policies": ["grd_explr_q=1"],
        "seed_budget": 3,
        "horizon": 20,
        "repetitions": 1,
        "oracle_samples": 50,
        "regret_samples": 0,
        "exploration": {"d": 3, "d_prime": 0, "coseed": "none"},
        "seed": 33,
    });
    let config_path = dir.path().join("learn.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = dir.path().join("results");
    let status = ltn()
        .args(["learn", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("snapshots.csv").exists());
    assert!(out.join("grd_explr_q=1_rep0.csv").exists());
}
