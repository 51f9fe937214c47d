//! Command-line harness for LT-N diffusion experiments.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on
//! usage/config errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ltn_core::experiment::{
    cmd_greedy, cmd_simulate, run_experiment, write_experiment_outputs, ExperimentConfig,
    GreedyConfig, SimulateConfig,
};
use ltn_core::verify::{run_suite, sign_probability_fuzz, Suite, VerifyReport};

#[derive(Parser)]
#[command(name = "ltn", version, about = "Negativity-aware linear threshold diffusion toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for Monte Carlo evaluation (env: LTN_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's top-level seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run cascades for a fixed seed set; write traces and summary stats.
    Simulate(CommonArgs),
    /// Greedy seed selection under the instance's true weights.
    Greedy(CommonArgs),
    /// Run a single learning policy and write its per-round CSV.
    Learn(CommonArgs),
    /// Run the multi-policy experiment protocol.
    Experiment(CommonArgs),
    /// Run a verification suite and write a JSON report.
    Verify {
        /// submodularity | equivalence | eigenvalue | greedy_ratio | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("bad config {}: {e}", path.display()))
}

fn setup_threads(cli_threads: Option<usize>) -> anyhow::Result<()> {
    let threads = cli_threads.or_else(|| {
        std::env::var("LTN_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow::anyhow!("thread pool: {e}"))?;
    }
    Ok(())
}

fn emit_reports(reports: &[VerifyReport], out: Option<&Path>) -> anyhow::Result<bool> {
    let doc = serde_json::json!({
        "passed": reports.iter().all(|r| r.passed),
        "suites": reports,
    });
    let text = serde_json::to_string_pretty(&doc)?;
    match out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?,
        None => println!("{text}"),
    }
    for report in reports {
        let status = if report.passed { "PASS" } else { "FAIL" };
        eprintln!(
            "suite {:<14} {status} ({}/{} checks)",
            report.suite,
            report.checks.iter().filter(|c| c.passed).count(),
            report.checks.len()
        );
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn write_snapshots_csv(path: &Path, run: &ltn_core::learning::LearnerRun) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new().from_path(path)?;
    w.write_record([
        "epoch",
        "round",
        "lambda_min_m",
        "lambda_min_v",
        "theta_residual",
        "beta_residual",
        "confidence_radius_theta",
        "confidence_radius_beta",
    ])?;
    for s in &run.snapshots {
        w.write_record([
            s.epoch.to_string(),
            s.round.to_string(),
            s.lambda_min_m.to_string(),
            s.lambda_min_v.to_string(),
            s.theta_residual.to_string(),
            s.beta_residual.to_string(),
            s.confidence_radius_theta.to_string(),
            s.confidence_radius_beta.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    setup_threads(cli.threads)?;
    match cli.command {
        Command::Simulate(args) => {
            let mut config: SimulateConfig = load_config(&args.config)?;
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            let written = cmd_simulate(&config, &args.out)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Greedy(args) => {
            let mut config: GreedyConfig = load_config(&args.config)?;
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            let result = cmd_greedy(&config)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Learn(args) => {
            let mut config: ExperimentConfig = load_config(&args.config)?;
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            if config.policies.len() != 1 {
                anyhow::bail!(
                    "learn expects exactly one policy, got {}",
                    config.policies.len()
                );
            }
            let outcome = run_experiment(&config)?;
            let written = write_experiment_outputs(&config, &outcome, &args.out)?;
            let run = &outcome.policies[0].runs[0];
            if !run.snapshots.is_empty() {
                let path = args.out.join("snapshots.csv");
                write_snapshots_csv(&path, run)?;
                println!("{}", path.display());
            }
            for path in written {
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment(args) => {
            let mut config: ExperimentConfig = load_config(&args.config)?;
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            let outcome = run_experiment(&config)?;
            let written = write_experiment_outputs(&config, &outcome, &args.out)?;
            for path in written {
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed, out } => {
            let parsed: Suite = suite.parse()?;
            let mut reports = run_suite(parsed, seed)?;
            if matches!(parsed, Suite::All) {
                reports.push(sign_probability_fuzz(100_000, seed)?);
            }
            let passed = emit_reports(&reports, out.as_deref())?;
            Ok(if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
