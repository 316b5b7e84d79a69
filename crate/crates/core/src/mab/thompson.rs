use rand::{Rng, RngCore};
use rand_distr::{Beta, StandardNormal};

use super::{check_arms, check_arm};
use crate::error::{BanditError, Result};
use crate::policy::{Context, Policy};
use crate::util::argmax;

/// Independent Gaussian posteriors with unit observation noise.
///
/// Stored as precision and precision-weighted mean so each update is exact.
#[derive(Debug, Clone)]
pub struct TsGaussianState {
    prior_mean: Vec<f64>,
    prior_var: Vec<f64>,
    precision: Vec<f64>,
    weighted_sum: Vec<f64>,
}

impl TsGaussianState {
    pub fn new(k: usize, prior_mean: f64, prior_var: f64) -> Result<Self> {
        Self::with_priors(vec![prior_mean; k], vec![prior_var; k])
    }

    pub fn with_priors(prior_mean: Vec<f64>, prior_var: Vec<f64>) -> Result<Self> {
        check_arms(prior_mean.len())?;
        if prior_mean.len() != prior_var.len() {
            return Err(BanditError::invalid("prior mean and variance lengths differ"));
        }
        if prior_var.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(BanditError::invalid("prior variances must be positive and finite"));
        }
        if prior_mean.iter().any(|m| !m.is_finite()) {
            return Err(BanditError::invalid("prior means must be finite"));
        }
        let mut state = Self {
            prior_mean,
            prior_var,
            precision: Vec::new(),
            weighted_sum: Vec::new(),
        };
        state.reset();
        Ok(state)
    }

    pub fn num_arms(&self) -> usize {
        self.prior_mean.len()
    }

    pub fn posterior_mean(&self, arm: usize) -> f64 {
        self.weighted_sum[arm] / self.precision[arm]
    }

    pub fn posterior_var(&self, arm: usize) -> f64 {
        1.0 / self.precision[arm]
    }

    /// Draw one mean per arm from its posterior and return the argmax.
    pub fn sample_arm(&self, rng: &mut dyn RngCore) -> usize {
        let draws: Vec<f64> = (0..self.num_arms())
            .map(|a| {
                let z: f64 = rng.sample(StandardNormal);
                self.posterior_mean(a) + self.posterior_var(a).sqrt() * z
            })
            .collect();
        argmax(&draws)
    }

    pub fn observe(&mut self, arm: usize, reward: f64) -> Result<()> {
        check_arm(arm, self.num_arms())?;
        self.precision[arm] += 1.0;
        self.weighted_sum[arm] += reward;
        Ok(())
    }

    pub fn reset(&mut self) {
        self.precision = self.prior_var.iter().map(|v| 1.0 / v).collect();
        self.weighted_sum = self
            .prior_mean
            .iter()
            .zip(&self.prior_var)
            .map(|(m, v)| m / v)
            .collect();
    }
}

/// Thompson sampling with Gaussian priors.
#[derive(Debug, Clone)]
pub struct ThompsonGaussian {
    state: TsGaussianState,
}

impl ThompsonGaussian {
    pub fn new(state: TsGaussianState) -> Self {
        Self { state }
    }

    /// Standard normal prior on every arm.
    pub fn standard(k: usize) -> Result<Self> {
        Ok(Self::new(TsGaussianState::new(k, 0.0, 1.0)?))
    }

    pub fn state(&self) -> &TsGaussianState {
        &self.state
    }
}

impl Policy for ThompsonGaussian {
    fn name(&self) -> String {
        "ts".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, rng: &mut dyn RngCore) -> usize {
        self.state.sample_arm(rng)
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        self.state.observe(arm, reward)
    }

    fn reset(&mut self) {
        self.state.reset();
    }
}

/// Thompson sampling with Beta(1,1) priors for rewards in [0, 1].
///
/// A fractional reward `r` adds `r` to alpha and `1 - r` to beta.
#[derive(Debug, Clone)]
pub struct ThompsonBeta {
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl ThompsonBeta {
    pub fn new(k: usize) -> Result<Self> {
        check_arms(k)?;
        Ok(Self {
            alpha: vec![1.0; k],
            beta: vec![1.0; k],
        })
    }
}

impl Policy for ThompsonBeta {
    fn name(&self) -> String {
        "ts_beta".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, rng: &mut dyn RngCore) -> usize {
        let draws: Vec<f64> = self
            .alpha
            .iter()
            .zip(&self.beta)
            .map(|(&a, &b)| {
                let dist = Beta::new(a, b).expect("alpha, beta >= 1");
                rng.sample(dist)
            })
            .collect();
        argmax(&draws)
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(BanditError::invalid(format!(
                "Beta-Bernoulli sampling needs rewards in [0, 1], got {reward}"
            )));
        }
        self.alpha[arm] += reward;
        self.beta[arm] += 1.0 - reward;
        Ok(())
    }

    fn reset(&mut self) {
        self.alpha.iter_mut().for_each(|a| *a = 1.0);
        self.beta.iter_mut().for_each(|b| *b = 1.0);
    }
}
