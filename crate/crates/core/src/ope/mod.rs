//! Off-policy evaluation from logged bandit feedback.

mod estimators;
mod io;
mod model;

pub use estimators::{
    dr_estimate, is_estimate, minimax_lower_value, reg_estimate, rejection_evaluate, v1_diagnostic,
    wis_estimate,
};
pub use io::{read_log, read_table, write_log, write_table};
pub use model::{
    HistoryPolicy, LogRecord, MissingCell, RewardModel, SampleAverageModel, TableModel, TablePolicy,
    TargetPolicy,
};
