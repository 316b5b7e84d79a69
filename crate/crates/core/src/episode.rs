//! Running one policy against one environment for a fixed horizon.

use rand::RngCore;

use crate::env::Environment;
use crate::error::{BanditError, Result};
use crate::policy::Policy;
use crate::util::rng_from_seed;

/// One round of play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub t: usize,
    pub arm: usize,
    /// Reward the policy observed.
    pub reward: f64,
    /// Reward before corruption.
    pub clean_reward: f64,
    /// Discrete context of the round, if any.
    pub context: Option<usize>,
    /// The baseline arm's reward this round, drawn whether or not it was played.
    pub baseline_reward: Option<f64>,
}

/// A full episode plus the per-round expected reward of every arm.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub steps: Vec<Step>,
    num_arms: usize,
    means: Vec<f64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    /// Expected rewards of every arm in round `t` (1-based).
    pub fn means_at(&self, t: usize) -> &[f64] {
        &self.means[(t - 1) * self.num_arms..t * self.num_arms]
    }

    pub fn arms(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.arm).collect()
    }

    pub fn pull_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_arms];
        for s in &self.steps {
            counts[s.arm] += 1;
        }
        counts
    }
}

fn check_horizon(env: &dyn Environment, horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(BanditError::Config("horizon must be at least 1".into()));
    }
    if let Some(max) = env.max_horizon() {
        if horizon > max {
            return Err(BanditError::Config(format!(
                "horizon {horizon} exceeds the environment's {max} rounds"
            )));
        }
    }
    Ok(())
}

fn play(
    env: &dyn Environment,
    policy: &mut dyn Policy,
    horizon: usize,
    rng: &mut dyn RngCore,
    mut baseline_rng: Option<&mut dyn RngCore>,
) -> Result<Trace> {
    check_horizon(env, horizon)?;
    let k = env.num_arms();
    let mut steps = Vec::with_capacity(horizon);
    let mut means = Vec::with_capacity(horizon * k);
    for t in 1..=horizon {
        let ctx = env.context(t, rng);
        let row = env.expected_rewards(t, &ctx);
        if row.len() != k {
            return Err(BanditError::InvariantViolation(format!(
                "round {t} exposes {} arms, expected {k}",
                row.len()
            )));
        }
        means.extend_from_slice(&row);
        let arm = policy.select(t, &ctx, rng);
        if arm >= k {
            return Err(BanditError::IndexOutOfRange { index: arm, len: k });
        }
        let (pull, baseline_reward) = match baseline_rng.as_deref_mut() {
            Some(brng) => {
                let base = env.pull(t, &ctx, 0, brng);
                let pull = if arm == 0 { base } else { env.pull(t, &ctx, arm, rng) };
                (pull, Some(base.clean))
            }
            None => (env.pull(t, &ctx, arm, rng), None),
        };
        policy.update(t, &ctx, arm, pull.observed)?;
        steps.push(Step {
            t,
            arm,
            reward: pull.observed,
            clean_reward: pull.clean,
            context: ctx.discrete(),
            baseline_reward,
        });
    }
    Ok(Trace {
        steps,
        num_arms: k,
        means,
    })
}

/// Plays `horizon` rounds drawing all randomness from `rng`.
pub fn run_episode_with(
    env: &dyn Environment,
    policy: &mut dyn Policy,
    horizon: usize,
    rng: &mut dyn RngCore,
) -> Result<Trace> {
    play(env, policy, horizon, rng, None)
}

/// Plays `horizon` rounds from a fresh generator seeded with `seed`.
pub fn run_episode(env: &dyn Environment, policy: &mut dyn Policy, horizon: usize, seed: u64) -> Result<Trace> {
    let mut rng = rng_from_seed(seed);
    run_episode_with(env, policy, horizon, &mut rng)
}

/// Like [`run_episode_with`], but arm 0's reward is drawn every round from
/// `baseline_rng` so the baseline's counterfactual stream is recorded. When
/// arm 0 is played, its observed reward is that stream's value.
pub fn run_episode_with_baseline(
    env: &dyn Environment,
    policy: &mut dyn Policy,
    horizon: usize,
    rng: &mut dyn RngCore,
    baseline_rng: &mut dyn RngCore,
) -> Result<Trace> {
    play(env, policy, horizon, rng, Some(baseline_rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{ArmDistribution, BanditInstance};
    use crate::mab::{Greedy, Ucb};

    #[test]
    fn same_seed_same_trace() {
        let env = BanditInstance::gaussian(&[0.2, 0.5, 0.1]).unwrap();
        let mut p = Ucb::new(3, 0.01).unwrap();
        let a = run_episode(&env, &mut p, 500, 42).unwrap();
        p.reset();
        let b = run_episode(&env, &mut p, 500, 42).unwrap();
        assert_eq!(a, b);
        p.reset();
        let c = run_episode(&env, &mut p, 500, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn constant_rewards_with_greedy() {
        let env = BanditInstance::new(vec![ArmDistribution::constant(1.0), ArmDistribution::constant(0.0)]).unwrap();
        let mut p = Greedy::new(2).unwrap();
        let tr = run_episode(&env, &mut p, 50, 0).unwrap();
        // greedy pays exactly one pull of the worse arm, then sticks to the best
        assert_eq!(tr.pull_counts(), vec![49, 1]);
        assert_eq!(tr.means_at(7), &[1.0, 0.0]);
    }

    #[test]
    fn baseline_stream_is_observed_when_arm_zero_plays() {
        let env = BanditInstance::bernoulli(&[0.5, 0.6]).unwrap();
        let mut p = Ucb::new(2, 0.1).unwrap();
        let mut rng = rng_from_seed(1);
        let mut brng = rng_from_seed(2);
        let tr = run_episode_with_baseline(&env, &mut p, 200, &mut rng, &mut brng).unwrap();
        for s in &tr.steps {
            assert!(s.baseline_reward.is_some());
            if s.arm == 0 {
                assert_eq!(Some(s.reward), s.baseline_reward);
            }
        }
    }

    #[test]
    fn rejects_bad_horizons() {
        let env = crate::env::RewardTable::new(vec![vec![0.0, 1.0]; 3]).unwrap();
        let mut p = Ucb::new(2, 0.1).unwrap();
        assert!(matches!(run_episode(&env, &mut p, 4, 0), Err(BanditError::Config(_))));
        assert!(run_episode(&env, &mut p, 0, 0).is_err());
    }
}
