use rand::RngCore;

use super::{BanditInstance, EnvFamily, Environment, Pull};
use crate::error::{BanditError, Result};
use crate::policy::Context;

/// Piecewise-stationary bandit: segment `i` is active from its start round
/// until the next segment begins.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseEnvironment {
    segments: Vec<(usize, BanditInstance)>,
}

impl PiecewiseEnvironment {
    pub fn new(segments: Vec<(usize, BanditInstance)>) -> Result<Self> {
        let Some((first, head)) = segments.first() else {
            return Err(BanditError::invalid("piecewise environment needs a segment"));
        };
        if *first != 1 {
            return Err(BanditError::invalid("first segment must start at round 1"));
        }
        let k = head.num_arms();
        for w in segments.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(BanditError::invalid("segment starts must be strictly increasing"));
            }
        }
        if segments.iter().any(|(_, inst)| inst.num_arms() != k) {
            return Err(BanditError::invalid("all segments must have the same number of arms"));
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[(usize, BanditInstance)] {
        &self.segments
    }

    pub fn instance_at(&self, t: usize) -> &BanditInstance {
        let idx = self.segments.partition_point(|(start, _)| *start <= t);
        &self.segments[idx.saturating_sub(1)].1
    }

    /// Number of stationary pieces (`S_T`): one plus the number of change points.
    pub fn change_count(&self) -> usize {
        self.segments.len()
    }

    /// Total variation budget `B_T`: sum over change points of the largest
    /// absolute per-arm mean jump.
    pub fn total_variation(&self) -> f64 {
        self.segments
            .windows(2)
            .map(|w| {
                w[0].1
                    .means()
                    .iter()
                    .zip(w[1].1.means())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .sum()
    }
}

impl Environment for PiecewiseEnvironment {
    fn family(&self) -> EnvFamily {
        EnvFamily::Piecewise
    }

    fn num_arms(&self) -> usize {
        self.segments[0].1.num_arms()
    }

    fn expected_rewards(&self, t: usize, _ctx: &Context) -> Vec<f64> {
        self.instance_at(t).means()
    }

    fn pull(&self, t: usize, _ctx: &Context, arm: usize, rng: &mut dyn RngCore) -> Pull {
        Pull::clean(self.instance_at(t).arms()[arm].sample(rng))
    }
}
