use rand::RngCore;

use crate::adversarial::{exp3_default_eta, Exp3};
use crate::env::Environment;
use crate::episode::run_episode_with;
use crate::error::{BanditError, Result};
use crate::mab::check_arms;
use crate::policy::{Context, Policy};

/// `ceil((K ln K)^(1/3) (T / B_T)^(2/3))`, clamped to `[1, T]`.
pub fn rexp3_batch_size(k: usize, horizon: usize, variation_budget: f64) -> Result<usize> {
    if !(variation_budget > 0.0) {
        return Err(BanditError::invalid("variation budget must be positive"));
    }
    let kf = k as f64;
    let raw = (kf * kf.ln()).cbrt() * (horizon as f64 / variation_budget).powf(2.0 / 3.0);
    Ok((raw.ceil().min(horizon as f64) as usize).max(1))
}

/// EXP3 restarted from scratch at the start of every batch.
#[derive(Debug, Clone)]
pub struct Rexp3 {
    horizon: usize,
    batch: usize,
    inner: Exp3,
}

impl Rexp3 {
    pub fn new(k: usize, horizon: usize, variation_budget: f64) -> Result<Self> {
        let batch = rexp3_batch_size(k, horizon, variation_budget)?;
        Self::with_batch(k, horizon, batch)
    }

    pub fn with_batch(k: usize, horizon: usize, batch: usize) -> Result<Self> {
        check_arms(k)?;
        if batch == 0 {
            return Err(BanditError::invalid("batch size must be at least 1"));
        }
        Ok(Self {
            horizon,
            batch,
            inner: Self::fresh(k, horizon, batch)?,
        })
    }

    fn fresh(k: usize, horizon: usize, batch: usize) -> Result<Exp3> {
        Exp3::new(k, exp3_default_eta(k, batch.min(horizon.max(1))))
    }

    pub fn batch_size(&self) -> usize {
        self.batch
    }

    pub fn num_batches(&self) -> usize {
        self.horizon.div_ceil(self.batch)
    }
}

impl Policy for Rexp3 {
    fn name(&self) -> String {
        "rexp3".into()
    }

    fn select(&mut self, t: usize, ctx: &Context, rng: &mut dyn RngCore) -> usize {
        if t > 1 && (t - 1) % self.batch == 0 {
            self.inner.reset();
        }
        self.inner.select(t, ctx, rng)
    }

    fn update(&mut self, t: usize, ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        self.inner.update(t, ctx, arm, reward)
    }

    fn reset(&mut self) {
        self.inner.reset();
    }
}

/// Runs Rexp3 for `horizon` rounds and returns the arms played.
pub fn rexp3_run(
    env: &dyn Environment,
    horizon: usize,
    variation_budget: f64,
    rng: &mut dyn RngCore,
) -> Result<Vec<usize>> {
    let mut policy = Rexp3::new(env.num_arms(), horizon, variation_budget)?;
    Ok(run_episode_with(env, &mut policy, horizon, rng)?.arms())
}
