use rand::RngCore;

use super::{check_arms, ArmStats};
use crate::error::{BanditError, Result};
use crate::policy::{Context, Policy};
use crate::util::argmax;

/// `ceil(T^(2/3))`, capped so that `m K <= T`.
pub fn etc_exploration_for_horizon(k: usize, horizon: usize) -> usize {
    let m = (horizon as f64).powf(2.0 / 3.0).ceil() as usize;
    m.min(horizon / k.max(1)).max(1)
}

/// Arm played by explore-then-commit at round `t` (1-based).
///
/// During exploration arms are visited round-robin as `t mod K`; afterwards
/// the arm with the largest mean in `stats` is returned. `stats` must hold the
/// statistics collected during the first `mK` rounds.
pub fn etc_select(t: usize, k: usize, m: usize, stats: &[ArmStats]) -> Result<usize> {
    if t == 0 {
        return Err(BanditError::invalid("rounds are numbered from 1"));
    }
    if t <= m * k {
        return Ok(t % k);
    }
    let means: Option<Vec<f64>> = stats.iter().map(ArmStats::mean).collect();
    let means = means.ok_or_else(|| {
        BanditError::InvariantViolation("commit phase reached with an unplayed arm".into())
    })?;
    Ok(argmax(&means))
}

#[derive(Debug, Clone)]
pub struct ExploreThenCommit {
    m: usize,
    stats: Vec<ArmStats>,
    committed: Option<usize>,
}

impl ExploreThenCommit {
    /// `horizon` is only used to reject `m K > T`.
    pub fn new(k: usize, m: usize, horizon: usize) -> Result<Self> {
        check_arms(k)?;
        if m == 0 {
            return Err(BanditError::Config("explore-then-commit needs m >= 1".into()));
        }
        if m * k > horizon {
            return Err(BanditError::Config(format!(
                "explore-then-commit with m = {m}, K = {k} explores past the horizon {horizon}"
            )));
        }
        Ok(Self {
            m,
            stats: vec![ArmStats::new(); k],
            committed: None,
        })
    }

    pub fn exploration(&self) -> usize {
        self.m
    }
}

impl Policy for ExploreThenCommit {
    fn name(&self) -> String {
        "etc".into()
    }

    fn select(&mut self, t: usize, _ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        let k = self.stats.len();
        if t <= self.m * k {
            return t % k;
        }
        *self.committed.get_or_insert_with(|| {
            etc_select(t, k, self.m, &self.stats).expect("every arm explored m >= 1 times")
        })
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        if self.committed.is_none() {
            self.stats[arm].record(reward);
        }
        Ok(())
    }

    fn reset(&mut self) {
        self.stats.iter_mut().for_each(ArmStats::clear);
        self.committed = None;
    }
}
