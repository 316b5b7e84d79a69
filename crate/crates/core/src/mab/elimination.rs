use std::collections::VecDeque;

use rand::RngCore;

use super::{check_arms, check_delta, lcb_index, ucb_index, ArmStats};
use crate::error::{BanditError, Result};
use crate::policy::{Context, Policy};
use crate::util::argmax;

/// Drop every active arm whose UCB lies below some other active arm's LCB.
pub fn se_eliminate(active: &[usize], stats: &[ArmStats], delta: f64) -> Result<Vec<usize>> {
    if active.is_empty() {
        return Err(BanditError::invalid("active arm set is empty"));
    }
    check_delta(delta)?;
    for &a in active {
        super::check_arm(a, stats.len())?;
    }
    let best_lcb = active
        .iter()
        .map(|&a| lcb_index(&stats[a], delta))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut kept = Vec::with_capacity(active.len());
    for &a in active {
        if ucb_index(&stats[a], delta)? >= best_lcb {
            kept.push(a);
        }
    }
    // an arm's own LCB never exceeds its UCB, so the arm attaining the best LCB survives
    debug_assert!(!kept.is_empty());
    Ok(kept)
}

/// Successive elimination in phases: each surviving arm is pulled once per
/// phase, then arms with dominated confidence intervals are dropped. Once a
/// single arm remains it is played for the rest of the run.
#[derive(Debug, Clone)]
pub struct SuccessiveElimination {
    delta: f64,
    stats: Vec<ArmStats>,
    active: Vec<usize>,
    pending: VecDeque<usize>,
}

impl SuccessiveElimination {
    pub fn new(k: usize, delta: f64) -> Result<Self> {
        check_arms(k)?;
        check_delta(delta)?;
        Ok(Self {
            delta,
            stats: vec![ArmStats::new(); k],
            active: (0..k).collect(),
            pending: (0..k).collect(),
        })
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Best surviving arm by empirical mean.
    pub fn leader(&self) -> usize {
        let means: Vec<f64> = self
            .active
            .iter()
            .map(|&a| self.stats[a].mean().unwrap_or(f64::NEG_INFINITY))
            .collect();
        self.active[argmax(&means)]
    }
}

impl Policy for SuccessiveElimination {
    fn name(&self) -> String {
        "se".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        if self.active.len() == 1 {
            return self.active[0];
        }
        *self.pending.front().expect("phase queue refilled after every phase")
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        self.stats[arm].record(reward);
        if self.active.len() == 1 {
            return Ok(());
        }
        if self.pending.front() == Some(&arm) {
            self.pending.pop_front();
        } else {
            return Err(BanditError::InvariantViolation(format!(
                "successive elimination expected arm {:?}, saw {arm}",
                self.pending.front()
            )));
        }
        if self.pending.is_empty() {
            self.active = se_eliminate(&self.active, &self.stats, self.delta)?;
            self.pending = self.active.iter().copied().collect();
        }
        Ok(())
    }

    fn reset(&mut self) {
        let k = self.stats.len();
        self.stats.iter_mut().for_each(ArmStats::clear);
        self.active = (0..k).collect();
        self.pending = (0..k).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DELTA: f64 = 0.05;

    // stats whose confidence interval at DELTA is (up to count rounding) [lo, hi]
    fn interval(lo: f64, hi: f64) -> ArmStats {
        let half = (hi - lo) / 2.0;
        let count = (2.0 * (1.0 / DELTA).ln() / (half * half)).round() as usize;
        ArmStats::with_mean(count, (lo + hi) / 2.0)
    }

    #[test]
    fn disjoint_intervals_drop_the_lower_arm() {
        let stats = [interval(0.6, 1.0), interval(0.1, 0.5)];
        assert_eq!(se_eliminate(&[0, 1], &stats, DELTA).unwrap(), vec![0]);
    }

    #[test]
    fn overlapping_intervals_keep_everything() {
        let stats = [interval(0.4, 0.8), interval(0.3, 0.7), interval(0.2, 0.6)];
        assert_eq!(se_eliminate(&[0, 1, 2], &stats, DELTA).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn three_arms_only_third_removed() {
        let stats = [interval(0.8, 1.0), interval(0.5, 0.9), interval(0.1, 0.3)];
        assert_eq!(se_eliminate(&[0, 1, 2], &stats, DELTA).unwrap(), vec![0, 1]);
    }

    #[test]
    fn empty_active_set_is_an_error() {
        assert!(se_eliminate(&[], &[ArmStats::new()], 0.1).is_err());
    }

    #[test]
    fn phases_pull_each_survivor_once() {
        let mut p = SuccessiveElimination::new(3, 0.1).unwrap();
        let mut rng = crate::util::rng_from_seed(0);
        let mut seen = Vec::new();
        for t in 1..=3 {
            let a = p.select(t, &Context::None, &mut rng);
            seen.push(a);
            p.update(t, &Context::None, a, 0.5).unwrap();
        }
        seen.sort();
        assert_eq!(seen, vec![0, 1, 2]);
    }

    proptest! {
        #[test]
        fn best_empirical_arm_survives(
            means in proptest::collection::vec(0.0f64..1.0, 2..8),
            counts in proptest::collection::vec(1usize..200, 8),
            delta in 0.001f64..0.5,
        ) {
            let stats: Vec<ArmStats> = means.iter().zip(&counts)
                .map(|(&m, &n)| ArmStats::with_mean(n, m)).collect();
            let active: Vec<usize> = (0..stats.len()).collect();
            let kept = se_eliminate(&active, &stats, delta).unwrap();
            prop_assert!(!kept.is_empty());
            let best = argmax(&stats.iter().map(|s| s.mean().unwrap()).collect::<Vec<_>>());
            prop_assert!(kept.contains(&best));
        }
    }
}
