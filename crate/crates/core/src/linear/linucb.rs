use nalgebra::DVector;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{round_actions, RidgeState};
use crate::error::{BanditError, Result};
use crate::policy::{Context, Policy};
use crate::util::argmax;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceSpec {
    pub delta: f64,
    /// Bound on `||theta*||_2`.
    pub theta_norm_bound: f64,
    /// Bound on `||a||_2` over all actions.
    pub action_norm_bound: f64,
}

impl ConfidenceSpec {
    pub fn new(delta: f64, theta_norm_bound: f64, action_norm_bound: f64) -> Result<Self> {
        crate::mab::check_delta(delta)?;
        if !(theta_norm_bound > 0.0) || !(action_norm_bound > 0.0) {
            return Err(BanditError::invalid("norm bounds must be positive"));
        }
        Ok(Self {
            delta,
            theta_norm_bound,
            action_norm_bound,
        })
    }
}

/// How the confidence expression enters the ellipsoid `||theta - theta_hat||_V^2 <= beta`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    /// The expression is `sqrt(beta)` (the ellipsoid radius).
    #[default]
    Radius,
    /// The expression is `beta` itself; the radius is its square root.
    Squared,
}

/// `sqrt(lambda) m2 + sqrt(2 ln(1/delta) + ln(det V / lambda^d))`.
pub fn linucb_radius(state: &RidgeState, spec: &ConfidenceSpec) -> f64 {
    state.lambda().sqrt() * spec.theta_norm_bound
        + (2.0 * (1.0 / spec.delta).ln() + state.log_det_ratio()).sqrt()
}

/// Optimistic choice `argmax <theta_hat, a> + radius ||a||_{V^-1}`.
pub fn linucb_select(state: &RidgeState, radius: f64, actions: &[DVector<f64>]) -> Result<usize> {
    if actions.is_empty() {
        return Err(BanditError::invalid("empty action set"));
    }
    let mut scores = Vec::with_capacity(actions.len());
    for a in actions {
        if a.len() != state.dim() {
            return Err(BanditError::invalid(format!(
                "action dimension {} does not match {}",
                a.len(),
                state.dim()
            )));
        }
        scores.push(state.theta_hat().dot(a) + radius * state.inverse_norm_sq(a).sqrt());
    }
    Ok(argmax(&scores))
}

#[derive(Debug, Clone)]
pub struct LinUcb {
    ridge: RidgeState,
    spec: ConfidenceSpec,
    mode: RadiusMode,
}

impl LinUcb {
    pub fn new(dim: usize, lambda: f64, spec: ConfidenceSpec, mode: RadiusMode) -> Result<Self> {
        Ok(Self {
            ridge: RidgeState::new(dim, lambda)?,
            spec,
            mode,
        })
    }

    pub fn ridge(&self) -> &RidgeState {
        &self.ridge
    }

    /// Current ellipsoid radius under the configured interpretation.
    pub fn radius(&self) -> f64 {
        let expr = linucb_radius(&self.ridge, &self.spec);
        match self.mode {
            RadiusMode::Radius => expr,
            RadiusMode::Squared => expr.sqrt(),
        }
    }
}

impl Policy for LinUcb {
    fn name(&self) -> String {
        "linucb".into()
    }

    fn select(&mut self, _t: usize, ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        let actions = round_actions(ctx, "LinUCB");
        linucb_select(&self.ridge, self.radius(), actions).expect("valid action set")
    }

    fn update(&mut self, _t: usize, ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        let actions = round_actions(ctx, "LinUCB");
        let a = actions
            .get(arm)
            .ok_or(BanditError::IndexOutOfRange { index: arm, len: actions.len() })?;
        self.ridge.update(a, reward)
    }

    fn reset(&mut self) {
        self.ridge.reset();
    }
}
