//! Failure-rate analysis, code planning, Monte Carlo validation, entropy
//! accounting and debiasing.

pub mod debias;
mod entropy;
mod failure;
mod montecarlo;
mod planner;

pub use entropy::{entropy_report, EntropyReport, LOW_BIAS_BAND};
pub use failure::{block_failure, key_failure_l, key_failure_mrr, FailureBudget};
pub use montecarlo::{
    montecarlo_failure, wilson_interval, write_trial_csv, MonteCarloConfig, MonteCarloReport, ResponseSource,
    TrialRecord,
};
pub use planner::{decode_cost, encode_cost, evaluate_code, plan_code, PlanResult};
