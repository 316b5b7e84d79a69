//! Environment models: stochastic, adversarial, piecewise-stationary,
//! corrupted, finite-context and linear.
//!
//! Environments are immutable; all randomness flows through the generator
//! handed to [`Environment::pull`], so a replication that owns its generator
//! owns its reward stream.

mod adversarial;
mod contextual;
mod corrupted;
mod linear;
mod piecewise;
mod stochastic;

use rand::RngCore;

use crate::policy::Context;

pub use adversarial::RewardTable;
pub use contextual::ContextualInstance;
pub use corrupted::{CorruptedEnvironment, Corruption};
pub use linear::{ActionSetGenerator, LinearEnvironment};
pub use piecewise::PiecewiseEnvironment;
pub use stochastic::{gaussian_kl, hard_instance_pair, ArmDistribution, BanditInstance, HardInstancePair};

/// Outcome of one pull. `clean` differs from `observed` only under corruption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pull {
    pub observed: f64,
    pub clean: f64,
}

impl Pull {
    pub fn clean(value: f64) -> Self {
        Pull {
            observed: value,
            clean: value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvFamily {
    Stochastic,
    Adversarial,
    Piecewise,
    Corrupted,
    Contextual,
    Linear,
}

/// The protocol every environment speaks: reveal a context, accept an arm,
/// emit a reward. `expected_rewards` exposes the true per-arm means of round
/// `t` so pseudo-regret can be computed from a trace.
pub trait Environment: Send + Sync {
    fn family(&self) -> EnvFamily;

    /// Number of arms (for linear environments: actions per round).
    fn num_arms(&self) -> usize;

    /// Largest horizon the environment can serve, if bounded.
    fn max_horizon(&self) -> Option<usize> {
        None
    }

    fn context(&self, _t: usize, _rng: &mut dyn RngCore) -> Context {
        Context::None
    }

    fn expected_rewards(&self, t: usize, ctx: &Context) -> Vec<f64>;

    fn pull(&self, t: usize, ctx: &Context, arm: usize, rng: &mut dyn RngCore) -> Pull;
}

impl Environment for BanditInstance {
    fn family(&self) -> EnvFamily {
        EnvFamily::Stochastic
    }

    fn num_arms(&self) -> usize {
        BanditInstance::num_arms(self)
    }

    fn expected_rewards(&self, _t: usize, _ctx: &Context) -> Vec<f64> {
        self.means()
    }

    fn pull(&self, _t: usize, _ctx: &Context, arm: usize, rng: &mut dyn RngCore) -> Pull {
        Pull::clean(self.arms()[arm].sample(rng))
    }
}
