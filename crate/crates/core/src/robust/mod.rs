//! Policies for non-stationary, safety-constrained and contaminated settings.

mod conservative;
mod contamination;
mod rexp3;
mod window;

pub use conservative::{conservative_select, conservative_slack, first_violation, BudgetLedger, BudgetRule, ConservativeConfig, ConservativeUcb};
pub use contamination::{cr_ucb_index, trimmed_mean, uncontaminated_regret, CrUcb, RobustConfig};
pub use rexp3::{rexp3_batch_size, rexp3_run, Rexp3};
pub use window::{sw_ucb_index, SlidingWindowUcb, WindowStats};
