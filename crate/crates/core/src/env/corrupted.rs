use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

use super::{BanditInstance, EnvFamily, Environment, Pull};
use crate::error::{BanditError, Result};
use crate::policy::Context;

/// Corruption values `zeta_t`, supplied by the caller.
#[derive(Clone)]
pub struct Corruption(Arc<dyn Fn(usize) -> f64 + Send + Sync>);

impl Corruption {
    pub fn constant(value: f64) -> Self {
        Corruption(Arc::new(move |_| value))
    }

    /// Round `t` uses `values[(t - 1) % len]`.
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(BanditError::invalid("corruption table is empty"));
        }
        Ok(Corruption(Arc::new(move |t| values[(t - 1) % values.len()])))
    }

    pub fn from_fn(f: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Corruption(Arc::new(f))
    }

    pub fn at(&self, t: usize) -> f64 {
        (self.0)(t)
    }
}

impl fmt::Debug for Corruption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Corruption(..)")
    }
}

/// Fraction-corruption model: each round is corrupted independently with
/// probability `eta`, in which case the learner sees `zeta_t` instead of the
/// clean draw.
#[derive(Debug, Clone)]
pub struct CorruptedEnvironment {
    base: BanditInstance,
    eta: f64,
    corruption: Corruption,
}

impl CorruptedEnvironment {
    pub fn new(base: BanditInstance, eta: f64, corruption: Corruption) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(BanditError::invalid(format!("corruption rate {eta} outside [0, 1]")));
        }
        Ok(Self {
            base,
            eta,
            corruption,
        })
    }

    pub fn base(&self) -> &BanditInstance {
        &self.base
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Returns `(observed, clean)` for one pull at round `t >= 1`.
    ///
    /// Draw order is fixed: corruption flag, then the clean reward, so the
    /// clean stream is recorded whether or not the round is corrupted.
    pub fn corrupted_reward(&self, arm: usize, t: usize, rng: &mut dyn RngCore) -> Result<(f64, f64)> {
        let corrupted = rng.random::<f64>() < self.eta;
        let clean = self.base.sample_reward(arm, rng)?;
        let observed = if corrupted { self.corruption.at(t) } else { clean };
        Ok((observed, clean))
    }
}

impl Environment for CorruptedEnvironment {
    fn family(&self) -> EnvFamily {
        EnvFamily::Corrupted
    }

    fn num_arms(&self) -> usize {
        self.base.num_arms()
    }

    fn expected_rewards(&self, _t: usize, _ctx: &Context) -> Vec<f64> {
        self.base.means()
    }

    fn pull(&self, t: usize, _ctx: &Context, arm: usize, rng: &mut dyn RngCore) -> Pull {
        let corrupted = rng.random::<f64>() < self.eta;
        let clean = self.base.arms()[arm].sample(rng);
        Pull {
            observed: if corrupted { self.corruption.at(t) } else { clean },
            clean,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rng_from_seed;

    fn base() -> BanditInstance {
        BanditInstance::gaussian(&[0.5, 0.2]).unwrap()
    }

    #[test]
    fn no_corruption_passes_clean_reward() {
        let env = CorruptedEnvironment::new(base(), 0.0, Corruption::constant(100.0)).unwrap();
        let mut rng = rng_from_seed(1);
        for t in 1..500 {
            let (obs, clean) = env.corrupted_reward(0, t, &mut rng).unwrap();
            assert_eq!(obs, clean);
        }
    }

    #[test]
    fn forced_corruption() {
        let env = CorruptedEnvironment::new(base(), 1.0, Corruption::constant(100.0)).unwrap();
        let mut rng = rng_from_seed(1);
        for t in 1..100 {
            assert_eq!(env.corrupted_reward(1, t, &mut rng).unwrap().0, 100.0);
        }
    }

    #[test]
    fn corruption_fraction_concentrates() {
        let env = CorruptedEnvironment::new(base(), 0.2, Corruption::constant(100.0)).unwrap();
        let mut rng = rng_from_seed(77);
        let n = 100_000;
        let hits = (1..=n)
            .filter(|&t| env.corrupted_reward(0, t, &mut rng).unwrap().0 == 100.0)
            .count();
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.2).abs() < 0.01, "fraction {frac}");
    }

    #[test]
    fn trait_pull_matches_direct_call() {
        let env = CorruptedEnvironment::new(base(), 0.3, Corruption::table(vec![5.0, 6.0]).unwrap()).unwrap();
        let mut a = rng_from_seed(9);
        let mut b = rng_from_seed(9);
        for t in 1..200 {
            let (obs, clean) = env.corrupted_reward(1, t, &mut a).unwrap();
            let pull = env.pull(t, &Context::None, 1, &mut b);
            assert_eq!((obs, clean), (pull.observed, pull.clean));
        }
    }

    #[test]
    fn rejects_bad_eta() {
        assert!(CorruptedEnvironment::new(base(), 1.5, Corruption::constant(0.0)).is_err());
    }
}
