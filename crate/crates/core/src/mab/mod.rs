//! Stochastic multi-armed bandit policies and their sufficient statistics.

mod elimination;
mod etc;
mod stats;
mod thompson;
mod ucb;

pub use elimination::{se_eliminate, SuccessiveElimination};
pub use etc::{etc_exploration_for_horizon, etc_select, ExploreThenCommit};
pub use stats::{confidence_width, ArmStats};
pub use thompson::{ThompsonBeta, ThompsonGaussian, TsGaussianState};
pub use ucb::{lcb_index, moss_index, ucb_index, Greedy, Moss, Ucb};

use crate::error::{BanditError, Result};

/// `1/T`, the confidence level used when a policy is tuned for a known horizon.
pub fn default_delta(horizon: usize) -> f64 {
    1.0 / horizon.max(2) as f64
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(BanditError::invalid(format!("delta = {delta} must lie in (0, 1)")))
    }
}

pub(crate) fn check_arms(k: usize) -> Result<()> {
    if k >= 2 {
        Ok(())
    } else {
        Err(BanditError::invalid(format!("need at least 2 arms, got {k}")))
    }
}

pub(crate) fn check_arm(arm: usize, k: usize) -> Result<()> {
    if arm < k {
        Ok(())
    } else {
        Err(BanditError::IndexOutOfRange { index: arm, len: k })
    }
}
