use rand::{Rng, RngCore};

use super::{EnvFamily, Environment, Pull};
use crate::error::{BanditError, Result};
use crate::policy::Context;

/// Oblivious adversary: a `T x K` table of rewards in `[0, 1]` fixed before play.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTable {
    rows: Vec<Vec<f64>>,
}

impl RewardTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(BanditError::invalid("reward table needs at least one round"));
        }
        let k = rows[0].len();
        if k < 2 {
            return Err(BanditError::invalid("reward table needs at least 2 arms"));
        }
        for (t, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(BanditError::invalid(format!(
                    "row {} has {} entries, expected {k}",
                    t + 1,
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(BanditError::invalid(format!(
                    "reward {v} in row {} outside [0, 1]",
                    t + 1
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Realizes an oblivious table by drawing each entry as Bernoulli(`means[a]`).
    pub fn bernoulli(means: &[f64], horizon: usize, rng: &mut dyn RngCore) -> Result<Self> {
        Self::bernoulli_schedule(horizon, rng, |_| means.to_vec())
    }

    /// Like [`RewardTable::bernoulli`] with round-dependent means.
    pub fn bernoulli_schedule(
        horizon: usize,
        rng: &mut dyn RngCore,
        means_at: impl Fn(usize) -> Vec<f64>,
    ) -> Result<Self> {
        let rows = (1..=horizon)
            .map(|t| {
                means_at(t)
                    .iter()
                    .map(|&p| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        Self::new(rows)
    }

    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    pub fn num_arms(&self) -> usize {
        self.rows[0].len()
    }

    /// Rewards of round `t` (1-based).
    pub fn row(&self, t: usize) -> &[f64] {
        &self.rows[t - 1]
    }

    /// Cumulative reward of each arm over the first `t` rounds.
    pub fn arm_totals(&self, t: usize) -> Vec<f64> {
        let mut totals = vec![0.0; self.num_arms()];
        for row in &self.rows[..t] {
            for (acc, r) in totals.iter_mut().zip(row) {
                *acc += r;
            }
        }
        totals
    }
}

impl Environment for RewardTable {
    fn family(&self) -> EnvFamily {
        EnvFamily::Adversarial
    }

    fn num_arms(&self) -> usize {
        RewardTable::num_arms(self)
    }

    fn max_horizon(&self) -> Option<usize> {
        Some(self.horizon())
    }

    fn expected_rewards(&self, t: usize, _ctx: &Context) -> Vec<f64> {
        self.row(t).to_vec()
    }

    fn pull(&self, t: usize, _ctx: &Context, arm: usize, _rng: &mut dyn RngCore) -> Pull {
        Pull::clean(self.row(t)[arm])
    }
}
