use log::warn;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::RngCore;

use super::{round_actions, RidgeState};
use crate::error::{BanditError, Result};
use crate::policy::{Context, Policy};
use crate::util::argmax;

/// An online linear regression learner plugged into OLR-UCB.
pub trait OnlinePredictor: Send {
    fn predict(&self, action: &DVector<f64>) -> f64;

    fn observe(&mut self, action: &DVector<f64>, reward: f64) -> Result<()>;

    /// Bound on the learner's cumulative squared-loss regret after the
    /// observations made so far; non-decreasing.
    fn regret_bound(&self) -> f64;

    fn reset(&mut self);
}

/// `1 + 2B + 32 R^2 ln((R sqrt(8) + sqrt(1 + B)) / delta)`.
pub fn online_to_confidence_beta(regret_bound: f64, noise: f64, delta: f64) -> Result<f64> {
    crate::mab::check_delta(delta)?;
    if !(regret_bound >= 0.0) {
        return Err(BanditError::invalid("regret bound must be non-negative"));
    }
    if !(noise > 0.0) {
        return Err(BanditError::invalid("noise scale must be positive"));
    }
    let b = regret_bound;
    let r = noise;
    Ok(1.0 + 2.0 * b + 32.0 * r * r * ((r * 8f64.sqrt() + (1.0 + b).sqrt()) / delta).ln())
}

/// Online ridge regression with the usual `O(d log t)` regret bound
/// `lambda m2^2 + 4 Y^2 d ln(1 + t L^2 / (lambda d))`.
#[derive(Debug, Clone)]
pub struct RidgePredictor {
    ridge: RidgeState,
    theta_norm_bound: f64,
    reward_bound: f64,
    action_norm_bound: f64,
}

impl RidgePredictor {
    pub fn new(
        dim: usize,
        lambda: f64,
        theta_norm_bound: f64,
        reward_bound: f64,
        action_norm_bound: f64,
    ) -> Result<Self> {
        Ok(Self {
            ridge: RidgeState::new(dim, lambda)?,
            theta_norm_bound,
            reward_bound,
            action_norm_bound,
        })
    }
}

impl OnlinePredictor for RidgePredictor {
    fn predict(&self, action: &DVector<f64>) -> f64 {
        self.ridge.theta_hat().dot(action)
    }

    fn observe(&mut self, action: &DVector<f64>, reward: f64) -> Result<()> {
        self.ridge.update(action, reward)
    }

    fn regret_bound(&self) -> f64 {
        let lambda = self.ridge.lambda();
        let d = self.ridge.dim() as f64;
        let t = self.ridge.count() as f64;
        let l2 = self.action_norm_bound * self.action_norm_bound;
        lambda * self.theta_norm_bound.powi(2)
            + 4.0 * self.reward_bound.powi(2) * d * (1.0 + t * l2 / (lambda * d)).ln()
    }

    fn reset(&mut self) {
        self.ridge.reset();
    }
}

/// Predicts with a fixed parameter and claims zero regret.
#[derive(Debug, Clone)]
pub struct FixedPredictor {
    theta: DVector<f64>,
    bound: f64,
}

impl FixedPredictor {
    pub fn new(theta: DVector<f64>, bound: f64) -> Self {
        Self { theta, bound }
    }
}

impl OnlinePredictor for FixedPredictor {
    fn predict(&self, action: &DVector<f64>) -> f64 {
        self.theta.dot(action)
    }

    fn observe(&mut self, _action: &DVector<f64>, _reward: f64) -> Result<()> {
        Ok(())
    }

    fn regret_bound(&self) -> f64 {
        self.bound
    }

    fn reset(&mut self) {}
}

/// UCB over the confidence set `{theta : sum_s (pred_s - <theta, A_s>)^2 <= beta}`
/// built from an online predictor's own predictions.
///
/// The set is intersected with the ball `lambda ||theta||^2 <= lambda m2^2`, which
/// keeps it bounded before the past actions span the space. It is then the
/// ellipsoid `(theta - c)^T G (theta - c) <= r^2` with `G = lambda I + sum A A^T`,
/// `c = G^-1 sum pred_s A_s` and `r^2 = beta + lambda m2^2 - sum pred_s^2 + b^T c`.
pub struct OlrUcb<P> {
    predictor: P,
    delta: f64,
    noise: f64,
    lambda: f64,
    theta_norm_bound: f64,
    gram: Cholesky<f64, Dyn>,
    b: DVector<f64>,
    pred_sq_sum: f64,
    plays: Vec<usize>,
    fallbacks: usize,
}

impl<P: OnlinePredictor> OlrUcb<P> {
    pub fn new(
        predictor: P,
        dim: usize,
        delta: f64,
        noise: f64,
        lambda: f64,
        theta_norm_bound: f64,
    ) -> Result<Self> {
        crate::mab::check_delta(delta)?;
        if dim == 0 || !(lambda > 0.0) || !(noise > 0.0) || !(theta_norm_bound > 0.0) {
            return Err(BanditError::invalid(
                "OLR-UCB needs positive dimension, lambda, noise scale and norm bound",
            ));
        }
        Ok(Self {
            predictor,
            delta,
            noise,
            lambda,
            theta_norm_bound,
            gram: Self::initial_gram(dim, lambda),
            b: DVector::zeros(dim),
            pred_sq_sum: 0.0,
            plays: Vec::new(),
            fallbacks: 0,
        })
    }

    fn initial_gram(dim: usize, lambda: f64) -> Cholesky<f64, Dyn> {
        Cholesky::new(DMatrix::identity(dim, dim) * lambda).expect("lambda I is positive definite")
    }

    pub fn predictor(&self) -> &P {
        &self.predictor
    }

    /// Number of rounds where the confidence set was numerically empty.
    pub fn fallbacks(&self) -> usize {
        self.fallbacks
    }

    /// Current centre and squared radius of the confidence ellipsoid.
    pub fn ellipsoid(&self) -> Result<(DVector<f64>, f64)> {
        let beta = online_to_confidence_beta(self.predictor.regret_bound(), self.noise, self.delta)?;
        let centre = self.gram.solve(&self.b);
        let r2 = beta + self.lambda * self.theta_norm_bound.powi(2) - self.pred_sq_sum
            + self.b.dot(&centre);
        Ok((centre, r2))
    }

    fn least_played(&self, n: usize) -> usize {
        (0..n)
            .min_by_key(|&i| self.plays.get(i).copied().unwrap_or(0))
            .unwrap_or(0)
    }
}

impl<P: OnlinePredictor> Policy for OlrUcb<P> {
    fn name(&self) -> String {
        "olr_ucb".into()
    }

    fn select(&mut self, t: usize, ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        let actions = round_actions(ctx, "OLR-UCB");
        let (centre, r2) = self.ellipsoid().expect("parameters validated at construction");
        if !(r2 > 0.0) || !r2.is_finite() {
            warn!("OLR-UCB confidence set empty at round {t} (r^2 = {r2}); playing least-played action");
            self.fallbacks += 1;
            return self.least_played(actions.len());
        }
        let radius = r2.sqrt();
        let scores: Vec<f64> = actions
            .iter()
            .map(|a| centre.dot(a) + radius * self.gram.solve(a).dot(a).max(0.0).sqrt())
            .collect();
        argmax(&scores)
    }

    fn update(&mut self, _t: usize, ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        let actions = round_actions(ctx, "OLR-UCB");
        let a = actions
            .get(arm)
            .ok_or(BanditError::IndexOutOfRange { index: arm, len: actions.len() })?;
        if a.len() != self.b.len() {
            return Err(BanditError::invalid("action dimension mismatch"));
        }
        let pred = self.predictor.predict(a);
        self.gram.rank_one_update(a, 1.0);
        self.b.axpy(pred, a, 1.0);
        self.pred_sq_sum += pred * pred;
        if self.plays.len() <= arm {
            self.plays.resize(arm + 1, 0);
        }
        self.plays[arm] += 1;
        self.predictor.observe(a, reward)
    }

    fn reset(&mut self) {
        let dim = self.b.len();
        self.predictor.reset();
        self.gram = Self::initial_gram(dim, self.lambda);
        self.b = DVector::zeros(dim);
        self.pred_sq_sum = 0.0;
        self.plays.clear();
        self.fallbacks = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rng_from_seed;
    use proptest::prelude::*;

    #[test]
    fn beta_examples() {
        let b = online_to_confidence_beta(0.0, 1.0, 0.1).unwrap();
        assert!((b - (1.0 + 32.0 * ((8f64.sqrt() + 1.0) / 0.1).ln())).abs() < 1e-9);
        assert!((b - 117.641).abs() < 1e-3);
        let near_one = online_to_confidence_beta(0.0, 1.0, 1.0 - 1e-12).unwrap();
        assert!((near_one - (1.0 + 32.0 * (8f64.sqrt() + 1.0).ln())).abs() < 1e-9);
        assert!((near_one - 43.959).abs() < 1e-3);
        assert!(online_to_confidence_beta(0.0, 1.0, 1.0).is_err());
        assert!(online_to_confidence_beta(0.0, 1.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn beta_increasing_in_regret_bound(b in 0.0f64..100.0, extra in 0.001f64..10.0, r in 0.1f64..3.0, d in 0.001f64..0.99) {
            prop_assert!(online_to_confidence_beta(b + extra, r, d).unwrap() > online_to_confidence_beta(b, r, d).unwrap());
        }
    }

    #[test]
    fn ridge_bound_is_non_decreasing() {
        let mut p = RidgePredictor::new(2, 1.0, 1.0, 1.0, 1.0).unwrap();
        let mut prev = p.regret_bound();
        for i in 0..100 {
            p.observe(&DVector::from_vec(vec![1.0, i as f64 * 0.01]), 0.5).unwrap();
            assert!(p.regret_bound() >= prev);
            prev = p.regret_bound();
        }
    }

    #[test]
    fn cold_start_picks_max_norm_action() {
        let pred = RidgePredictor::new(2, 1.0, 1.0, 1.0, 1.0).unwrap();
        let mut p = OlrUcb::new(pred, 2, 0.1, 1.0, 1.0, 1.0).unwrap();
        let ctx = Context::Actions(vec![
            DVector::from_vec(vec![0.1, 0.0]),
            DVector::from_vec(vec![0.0, 0.9]),
            DVector::from_vec(vec![0.3, 0.3]),
        ]);
        let mut rng = rng_from_seed(0);
        assert_eq!(p.select(1, &ctx, &mut rng), 1);
    }

    #[test]
    fn infeasible_set_falls_back_to_least_played() {
        // predictions no bounded parameter can explain empty the set
        struct Liar;
        impl OnlinePredictor for Liar {
            fn predict(&self, _a: &DVector<f64>) -> f64 {
                1e6
            }
            fn observe(&mut self, _a: &DVector<f64>, _r: f64) -> Result<()> {
                Ok(())
            }
            fn regret_bound(&self) -> f64 {
                0.0
            }
            fn reset(&mut self) {}
        }
        let mut p = OlrUcb::new(Liar, 1, 0.1, 1.0, 1.0, 1.0).unwrap();
        let ctx = Context::Actions(vec![DVector::from_vec(vec![1.0]), DVector::from_vec(vec![0.5])]);
        let mut rng = rng_from_seed(0);
        p.update(1, &ctx, 0, 0.0).unwrap();
        assert_eq!(p.select(2, &ctx, &mut rng), 1);
        assert_eq!(p.fallbacks(), 1);
    }
}
