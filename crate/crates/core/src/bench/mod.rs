//! Experiment harness: scenario x learner grids over seeded trials, with
//! regret checkpoints, closed-form guarantees and CSV/JSON output.

mod aggregate;
mod bounds;
mod config;
mod registry;
mod run;

pub use aggregate::{bootstrap_mean_ci, mean, median, summarize, Summary, BOOTSTRAP_RESAMPLES};
pub use bounds::{evaluate_theorem_bound, hint_stats, hint_stats_at, BoundInputs, HintStats, TheoremBound};
pub use config::{ExperimentConfig, OutputFormat, OutputSpec};
pub use registry::{build_learner, BoundPlan, LearnerSpec, ProblemShape, LEARNER_NAMES};
pub use run::{
    checkpoints, combiner_bound, metadata, plan_bounds, play, run_experiment, run_trial, write_csv, write_metadata,
    Metadata, ResultRow, CSV_COLUMNS, MAX_VERTEX_CANDIDATES,
};
