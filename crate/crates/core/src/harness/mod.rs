//! Experiment harness: configs, Monte Carlo runs, regret curves, fits and result files.

mod config;
mod fit;
mod output;
mod regret;
mod runner;

pub use config::{
    ActionSpec, BudgetRuleSpec, BuiltEnv, EnvInfo, EnvSpec, ExperimentConfig, ExpertFamily, ExpertsSpec,
    PolicyList, PolicySpec, RewardFamily, RunSpec,
};
pub use fit::{asymptotic_lb_reference, bayes_regret_estimate, scaling_exponent_fit};
pub use output::{
    read_results, read_summary, summary_path, write_results, write_summary, ResultRow, Summary, RESULTS_HEADER,
};
pub use regret::{expert_regret, mean_stderr, regret_from_trace, RegretCurve, RegretKind};
pub use runner::{fit_grid, run_at_horizon, run_experiment, sweep, Execution, ExperimentRun, PolicyRun, RepCurve, SweepRun};
