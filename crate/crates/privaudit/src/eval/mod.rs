//! Attack evaluation: rank metrics, single audit trials, and seeded
//! experiment grids with CSV output.

mod experiment;
mod metrics;
mod trial;

pub use experiment::{
    build_profile_cache, profile_key, profile_seed, results_csv, run_experiment,
    run_experiment_with_profiles, summarize, summary_csv, timings_csv, trial_seed,
    ExperimentOutcome, ProfileKey, ResultRow, SummaryRow,
};
pub use metrics::{auc, membership_advantage, roc, roc_area};
pub use trial::{
    run_trial, run_trial_with_profile, AttackKind, AttackReport, StageRuntimes, TrialConfig,
    TrialResult,
};
