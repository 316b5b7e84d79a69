use rand::RngCore;

use crate::error::{BanditError, Result};
use crate::mab::{check_arm, check_arms};
use crate::policy::{Context, Policy};
use crate::util::{sample_index, softmax};

/// `sqrt(ln K / (K T))`.
pub fn exp3_default_eta(k: usize, horizon: usize) -> f64 {
    ((k as f64).ln() / (k as f64 * horizon.max(1) as f64)).sqrt()
}

/// `gamma = eta / 2 = sqrt(2 ln K / (K T)) / 2`.
pub fn exp3ix_default_gamma(k: usize, horizon: usize) -> f64 {
    (2.0 * (k as f64).ln() / (k as f64 * horizon.max(1) as f64)).sqrt() / 2.0
}

fn check_prob(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 + 1e-12 {
        Ok(())
    } else {
        Err(BanditError::invalid(format!("probability {p} must lie in (0, 1]")))
    }
}

/// Importance-weighted reward estimate `1{chosen = a} R / p_a`.
pub fn iw_estimator_v1(chosen: usize, arm: usize, reward: f64, p_arm: f64) -> Result<f64> {
    check_prob(p_arm)?;
    Ok(if chosen == arm { reward / p_arm } else { 0.0 })
}

/// Loss-based estimate `1 - 1{chosen = a} (1 - R) / p_a`.
pub fn iw_estimator_v2(chosen: usize, arm: usize, reward: f64, p_arm: f64) -> Result<f64> {
    check_prob(p_arm)?;
    Ok(if chosen == arm {
        1.0 - (1.0 - reward) / p_arm
    } else {
        1.0
    })
}

/// Implicit-exploration loss estimate `1{chosen = a} Y / (p_a + gamma)`.
pub fn exp3ix_loss(chosen: usize, arm: usize, loss: f64, p_arm: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(BanditError::invalid(format!("gamma = {gamma} must be positive")));
    }
    check_prob(p_arm)?;
    Ok(if chosen == arm { loss / (p_arm + gamma) } else { 0.0 })
}

fn check_rate(eta: f64) -> Result<()> {
    if eta >= 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(BanditError::invalid(format!("learning rate {eta} must be finite and non-negative")))
    }
}

/// Cumulative reward estimates and learning rate of EXP3.
#[derive(Debug, Clone)]
pub struct Exp3State {
    s_hat: Vec<f64>,
    eta: f64,
}

impl Exp3State {
    pub fn new(k: usize, eta: f64) -> Result<Self> {
        check_arms(k)?;
        check_rate(eta)?;
        Ok(Self {
            s_hat: vec![0.0; k],
            eta,
        })
    }

    pub fn from_estimates(s_hat: Vec<f64>, eta: f64) -> Result<Self> {
        check_arms(s_hat.len())?;
        check_rate(eta)?;
        Ok(Self { s_hat, eta })
    }

    pub fn estimates(&self) -> &[f64] {
        &self.s_hat
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn probs(&self) -> Vec<f64> {
        softmax(&self.s_hat, self.eta)
    }

    pub fn update(&mut self, chosen: usize, reward: f64, p_chosen: f64) -> Result<()> {
        check_arm(chosen, self.s_hat.len())?;
        if !(p_chosen > 0.0) {
            return Err(BanditError::InvariantViolation(format!(
                "EXP3 update with P[chosen] = {p_chosen}"
            )));
        }
        for (a, s) in self.s_hat.iter_mut().enumerate() {
            *s += iw_estimator_v2(chosen, a, reward, p_chosen.min(1.0))?;
        }
        Ok(())
    }

    pub fn reset(&mut self) {
        self.s_hat.iter_mut().for_each(|s| *s = 0.0);
    }
}

#[derive(Debug, Clone)]
pub struct Exp3 {
    state: Exp3State,
    probs: Vec<f64>,
}

impl Exp3 {
    pub fn new(k: usize, eta: f64) -> Result<Self> {
        let state = Exp3State::new(k, eta)?;
        Ok(Self {
            probs: state.probs(),
            state,
        })
    }

    pub fn for_horizon(k: usize, horizon: usize) -> Result<Self> {
        Self::new(k, exp3_default_eta(k, horizon))
    }

    pub fn state(&self) -> &Exp3State {
        &self.state
    }

    /// Distribution used in the most recent `select`.
    pub fn last_probs(&self) -> &[f64] {
        &self.probs
    }
}

impl Policy for Exp3 {
    fn name(&self) -> String {
        "exp3".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, rng: &mut dyn RngCore) -> usize {
        self.probs = self.state.probs();
        sample_index(&self.probs, rng)
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        let p = *self
            .probs
            .get(arm)
            .ok_or(BanditError::IndexOutOfRange { index: arm, len: self.probs.len() })?;
        self.state.update(arm, reward, p)
    }

    fn reset(&mut self) {
        self.state.reset();
        self.probs = self.state.probs();
    }
}

/// EXP3 with implicit exploration, run on losses `1 - R`.
#[derive(Debug, Clone)]
pub struct Exp3Ix {
    loss_hat: Vec<f64>,
    eta: f64,
    gamma: f64,
    probs: Vec<f64>,
}

impl Exp3Ix {
    pub fn new(k: usize, eta: f64, gamma: f64) -> Result<Self> {
        check_arms(k)?;
        check_rate(eta)?;
        if !(gamma > 0.0) {
            return Err(BanditError::invalid(format!("gamma = {gamma} must be positive")));
        }
        Ok(Self {
            loss_hat: vec![0.0; k],
            eta,
            gamma,
            probs: vec![1.0 / k as f64; k],
        })
    }

    pub fn for_horizon(k: usize, horizon: usize) -> Result<Self> {
        let gamma = exp3ix_default_gamma(k, horizon);
        Self::new(k, 2.0 * gamma, gamma)
    }

    pub fn probs(&self) -> Vec<f64> {
        softmax(&self.loss_hat, -self.eta)
    }
}

impl Policy for Exp3Ix {
    fn name(&self) -> String {
        "exp3ix".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, rng: &mut dyn RngCore) -> usize {
        self.probs = self.probs();
        sample_index(&self.probs, rng)
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        check_arm(arm, self.loss_hat.len())?;
        let p = self.probs[arm];
        if !(p > 0.0) {
            return Err(BanditError::InvariantViolation(format!(
                "EXP3-IX update with P[chosen] = {p}"
            )));
        }
        self.loss_hat[arm] += exp3ix_loss(arm, arm, 1.0 - reward, p.min(1.0), self.gamma)?;
        Ok(())
    }

    fn reset(&mut self) {
        let k = self.loss_hat.len();
        self.loss_hat.iter_mut().for_each(|l| *l = 0.0);
        self.probs = vec![1.0 / k as f64; k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn probs_examples() {
        let s = Exp3State::new(3, 0.7).unwrap();
        for p in s.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        let s = Exp3State::from_estimates(vec![10.0, 0.0], 0.1).unwrap();
        let e = std::f64::consts::E;
        let p = s.probs();
        assert!((p[0] - e / (e + 1.0)).abs() < 1e-12);
        assert!((p[0] - 0.7311).abs() < 1e-4);
        assert!((p[1] - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn update_examples() {
        let mut s = Exp3State::new(2, 0.1).unwrap();
        s.update(0, 1.0, 0.5).unwrap();
        assert_eq!(s.estimates(), &[1.0, 1.0]);
        let mut s = Exp3State::new(2, 0.1).unwrap();
        s.update(0, 0.0, 0.5).unwrap();
        assert_eq!(s.estimates(), &[-1.0, 1.0]);
        let mut s = Exp3State::new(3, 0.1).unwrap();
        s.update(2, 0.37, 0.2).unwrap();
        assert_eq!(s.estimates()[0], 1.0);
        assert_eq!(s.estimates()[1], 1.0);
        assert!(s.update(0, 0.5, 0.0).is_err());
    }

    #[test]
    fn estimator_examples() {
        assert_eq!(iw_estimator_v1(1, 1, 1.0, 0.5).unwrap(), 2.0);
        assert_eq!(iw_estimator_v1(0, 1, 1.0, 0.5).unwrap(), 0.0);
        assert!(iw_estimator_v1(0, 1, 1.0, 0.0).is_err());
        assert!((exp3ix_loss(0, 0, 1.0, 0.5, 0.1).unwrap() - 1.0 / 0.6).abs() < 1e-15);
        assert!(exp3ix_loss(0, 0, 1.0, 0.5, 0.0).is_err());
    }

    fn distribution() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..6).prop_flat_map(|k| {
            (
                proptest::collection::vec(0.01f64..1.0, k),
                proptest::collection::vec(0.0f64..=1.0, k),
            )
        })
    }

    fn normalise(w: &[f64]) -> Vec<f64> {
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    }

    proptest! {
        #[test]
        fn estimators_are_unbiased_with_known_variance((w, r) in distribution()) {
            let p = normalise(&w);
            let k = p.len();
            for a in 0..k {
                let mut m1 = 0.0;
                let mut m2 = 0.0;
                let mut s1 = 0.0;
                let mut s2 = 0.0;
                for (drawn, &pd) in p.iter().enumerate() {
                    let v1 = iw_estimator_v1(drawn, a, r[drawn], p[a]).unwrap();
                    let v2 = iw_estimator_v2(drawn, a, r[drawn], p[a]).unwrap();
                    m1 += pd * v1;
                    m2 += pd * v2;
                    s1 += pd * v1 * v1;
                    s2 += pd * v2 * v2;
                }
                prop_assert!((m1 - r[a]).abs() < 1e-9);
                prop_assert!((m2 - r[a]).abs() < 1e-9);
                let var1 = s1 - m1 * m1;
                let var2 = s2 - m2 * m2;
                let scale = 1.0 + 1.0 / p[a];
                prop_assert!((var1 - r[a] * r[a] * (1.0 - p[a]) / p[a]).abs() < 1e-9 * scale * scale);
                prop_assert!((var2 - (1.0 - r[a]).powi(2) * (1.0 - p[a]) / p[a]).abs() < 1e-9 * scale * scale);
            }
        }

        #[test]
        fn implicit_exploration_biases_down((w, y) in distribution(), gamma in 0.001f64..1.0) {
            let p = normalise(&w);
            for a in 0..p.len() {
                let mean: f64 = p.iter().enumerate()
                    .map(|(drawn, &pd)| pd * exp3ix_loss(drawn, a, y[drawn], p[a], gamma).unwrap())
                    .sum();
                prop_assert!((mean - p[a] * y[a] / (p[a] + gamma)).abs() < 1e-12);
                prop_assert!(mean <= y[a] + 1e-15);
            }
        }

        #[test]
        fn probs_shift_invariant_and_positive(
            s in proptest::collection::vec(-50.0f64..50.0, 2..8),
            shift in -100.0f64..100.0,
            eta in 0.0f64..2.0,
        ) {
            let a = Exp3State::from_estimates(s.clone(), eta).unwrap().probs();
            let b = Exp3State::from_estimates(s.iter().map(|x| x + shift).collect(), eta).unwrap().probs();
            prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!(*x > 0.0);
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
