use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};

/// Reward law of one arm. Every variant is 1-subgaussian once validated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmDistribution {
    Gaussian { mean: f64, variance: f64 },
    Bernoulli { p: f64 },
    Constant { value: f64 },
}

impl ArmDistribution {
    pub fn gaussian(mean: f64, variance: f64) -> Self {
        ArmDistribution::Gaussian { mean, variance }
    }

    pub fn unit_gaussian(mean: f64) -> Self {
        ArmDistribution::Gaussian { mean, variance: 1.0 }
    }

    pub fn bernoulli(p: f64) -> Self {
        ArmDistribution::Bernoulli { p }
    }

    pub fn constant(value: f64) -> Self {
        ArmDistribution::Constant { value }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ArmDistribution::Gaussian { mean, variance } => {
                if !mean.is_finite() {
                    return Err(BanditError::invalid("gaussian mean must be finite"));
                }
                if !(0.0..=1.0).contains(&variance) {
                    return Err(BanditError::invalid(format!(
                        "gaussian variance {variance} outside [0, 1]; arms must be 1-subgaussian"
                    )));
                }
            }
            ArmDistribution::Bernoulli { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(BanditError::invalid(format!("bernoulli p = {p} outside [0, 1]")));
                }
            }
            ArmDistribution::Constant { value } => {
                if !value.is_finite() {
                    return Err(BanditError::invalid("constant reward must be finite"));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ArmDistribution::Gaussian { mean, .. } => mean,
            ArmDistribution::Bernoulli { p } => p,
            ArmDistribution::Constant { value } => value,
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        match *self {
            ArmDistribution::Gaussian { mean, variance } => {
                if variance == 0.0 {
                    return mean;
                }
                // validated: finite mean, variance in (0, 1]
                Normal::new(mean, variance.sqrt())
                    .expect("validated gaussian parameters")
                    .sample(rng)
            }
            ArmDistribution::Bernoulli { p } => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
            ArmDistribution::Constant { value } => value,
        }
    }
}

/// A stochastic K-armed bandit: one reward distribution per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditInstance {
    arms: Vec<ArmDistribution>,
}

impl BanditInstance {
    pub fn new(arms: Vec<ArmDistribution>) -> Result<Self> {
        if arms.len() < 2 {
            return Err(BanditError::invalid(format!(
                "a bandit needs at least 2 arms, got {}",
                arms.len()
            )));
        }
        for arm in &arms {
            arm.validate()?;
        }
        Ok(Self { arms })
    }

    /// Unit-variance Gaussian arms with the given means.
    pub fn gaussian(means: &[f64]) -> Result<Self> {
        Self::new(means.iter().map(|&m| ArmDistribution::unit_gaussian(m)).collect())
    }

    pub fn bernoulli(ps: &[f64]) -> Result<Self> {
        Self::new(ps.iter().map(|&p| ArmDistribution::bernoulli(p)).collect())
    }

    pub fn arms(&self) -> &[ArmDistribution] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(ArmDistribution::mean).collect()
    }

    pub fn best_mean(&self) -> f64 {
        self.arms
            .iter()
            .map(ArmDistribution::mean)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Lowest-index optimal arm.
    pub fn best_arm(&self) -> usize {
        crate::util::argmax(&self.means())
    }

    /// Suboptimality gaps `mu* - mu_a`.
    pub fn gaps(&self) -> Vec<f64> {
        let best = self.best_mean();
        self.arms.iter().map(|a| best - a.mean()).collect()
    }

    pub fn sample_reward(&self, arm: usize, rng: &mut dyn RngCore) -> Result<f64> {
        let dist = self.arms.get(arm).ok_or(BanditError::IndexOutOfRange {
            index: arm,
            len: self.arms.len(),
        })?;
        Ok(dist.sample(rng))
    }
}

/// The two nearly indistinguishable Gaussian instances behind the
/// `sqrt(KT)` minimax lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct HardInstancePair {
    pub base: BanditInstance,
    pub delta: f64,
}

impl HardInstancePair {
    /// The alternative instance: the base means with coordinate `i` raised to `2 * delta`.
    /// `i` must be one of the base's zero-mean arms (not arm 0).
    pub fn alternative(&self, i: usize) -> Result<BanditInstance> {
        let k = self.base.num_arms();
        if i == 0 || i >= k {
            return Err(BanditError::invalid(format!(
                "alternative coordinate must lie in 1..{k}, got {i}"
            )));
        }
        let mut means = self.base.means();
        means[i] = 2.0 * self.delta;
        BanditInstance::gaussian(&means)
    }
}

/// Builds the hard pair for `k` arms and horizon `horizon`:
/// `delta = sqrt((k - 1) / (4 * horizon))`, base means `(delta, 0, ..., 0)`.
pub fn hard_instance_pair(k: usize, horizon: usize) -> Result<HardInstancePair> {
    if k < 2 {
        return Err(BanditError::invalid("hard instance needs k >= 2"));
    }
    if horizon < k - 1 {
        return Err(BanditError::invalid(format!(
            "hard instance needs horizon >= k - 1 (k = {k}, horizon = {horizon})"
        )));
    }
    let delta = ((k - 1) as f64 / (4.0 * horizon as f64)).sqrt();
    let mut means = vec![0.0; k];
    means[0] = delta;
    Ok(HardInstancePair {
        base: BanditInstance::gaussian(&means)?,
        delta,
    })
}

/// KL divergence between unit-variance Gaussians.
pub fn gaussian_kl(mean_p: f64, mean_q: f64) -> f64 {
    (mean_p - mean_q).powi(2) / 2.0
}
