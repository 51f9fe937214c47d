//! Epoch-scheduled online learners over node-level feedback, baseline
//! policies, ridge estimation, and regret accounting.

mod config;
mod ridge;
mod run;
mod schedule;

pub use config::{
    confidence_radius, gram_min_eigenvalue, select_exploration_sets, CoSeed, ConfigDiagnostics,
    LearnerConfig, OracleCalls,
};
pub use ridge::{RidgeEstimator, RidgeState};
pub use run::{
    compute_f_star, compute_scaled_regret, run_algorithm1, run_algorithm2, run_baseline,
    EpochSnapshot, FStarMethod, Instance, LearnerRun, Policy, RegretConfig, RegretRecord,
    RoundRecord,
};
pub use schedule::{EpochSchedule, Phase, RoundPhase};
