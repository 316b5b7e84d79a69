use nalgebra::DVector;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

use super::{EnvFamily, Environment, Pull};
use crate::error::{BanditError, Result};
use crate::linear::embed_shared;
use crate::policy::Context;

/// How the action set of each round is produced.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionSetGenerator {
    /// The same finite set every round.
    Fixed(Vec<DVector<f64>>),
    /// `count` fresh points drawn uniformly on the sphere of the given radius.
    Sphere { count: usize, radius: f64 },
    /// One shared context in `R^context_dim` on the sphere of the given
    /// radius, block-embedded for each of `arms` arms (per-arm parameters).
    SharedContext {
        arms: usize,
        context_dim: usize,
        radius: f64,
    },
}

impl ActionSetGenerator {
    fn count(&self) -> usize {
        match self {
            ActionSetGenerator::Fixed(set) => set.len(),
            ActionSetGenerator::Sphere { count, .. } => *count,
            ActionSetGenerator::SharedContext { arms, .. } => *arms,
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            ActionSetGenerator::Fixed(set) => set.first().map(|a| a.len()),
            ActionSetGenerator::Sphere { .. } => None,
            ActionSetGenerator::SharedContext {
                arms, context_dim, ..
            } => Some(arms * context_dim),
        }
    }

    fn norm_bound(&self) -> f64 {
        match self {
            ActionSetGenerator::Fixed(set) => set.iter().map(|a| a.norm()).fold(0.0, f64::max),
            ActionSetGenerator::Sphere { radius, .. } => *radius,
            ActionSetGenerator::SharedContext { radius, .. } => *radius,
        }
    }
}

fn sphere_point(dim: usize, radius: f64, rng: &mut dyn RngCore) -> DVector<f64> {
    loop {
        let v: DVector<f64> = DVector::from_fn(dim, |_, _| StandardNormal.sample(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v * (radius / n);
        }
    }
}

/// Linear bandit: `R_t = <theta*, A_t> + eta_t` with Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEnvironment {
    theta_star: DVector<f64>,
    actions: ActionSetGenerator,
    noise_sigma: f64,
}

impl LinearEnvironment {
    pub fn new(theta_star: DVector<f64>, actions: ActionSetGenerator, noise_sigma: f64) -> Result<Self> {
        let d = theta_star.len();
        if d == 0 {
            return Err(BanditError::invalid("theta* must have positive dimension"));
        }
        if !(0.0..=1.0).contains(&noise_sigma) {
            return Err(BanditError::invalid(format!(
                "noise sigma {noise_sigma} outside [0, 1]"
            )));
        }
        if actions.count() == 0 {
            return Err(BanditError::invalid("action sets must be non-empty"));
        }
        if let Some(ad) = actions.dim() {
            if ad != d {
                return Err(BanditError::invalid(format!(
                    "actions live in R^{ad} but theta* in R^{d}"
                )));
            }
        }
        match &actions {
            ActionSetGenerator::Fixed(set) => {
                if set.iter().any(|a| a.len() != d) {
                    return Err(BanditError::invalid("fixed actions must share theta*'s dimension"));
                }
                let values: Vec<f64> = set.iter().map(|a| theta_star.dot(a)).collect();
                let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - values.iter().cloned().fold(f64::INFINITY, f64::min);
                if spread > 1.0 + 1e-12 {
                    return Err(BanditError::invalid(format!(
                        "expected-reward spread {spread} exceeds 1"
                    )));
                }
            }
            ActionSetGenerator::Sphere { radius, .. } | ActionSetGenerator::SharedContext { radius, .. } => {
                if *radius <= 0.0 {
                    return Err(BanditError::invalid("action radius must be positive"));
                }
                if 2.0 * radius * theta_star.norm() > 1.0 + 1e-12 {
                    return Err(BanditError::invalid(
                        "2 * L * |theta*| must be at most 1 so reward spreads stay within 1",
                    ));
                }
            }
        }
        Ok(Self {
            theta_star,
            actions,
            noise_sigma,
        })
    }

    pub fn theta_star(&self) -> &DVector<f64> {
        &self.theta_star
    }

    pub fn dim(&self) -> usize {
        self.theta_star.len()
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    /// Bound `L` on the Euclidean norm of every action.
    pub fn action_norm_bound(&self) -> f64 {
        self.actions.norm_bound()
    }

    pub fn action_set(&self, rng: &mut dyn RngCore) -> Vec<DVector<f64>> {
        let d = self.dim();
        match &self.actions {
            ActionSetGenerator::Fixed(set) => set.clone(),
            ActionSetGenerator::Sphere { count, radius } => {
                (0..*count).map(|_| sphere_point(d, *radius, rng)).collect()
            }
            ActionSetGenerator::SharedContext {
                arms,
                context_dim,
                radius,
            } => {
                let c = sphere_point(*context_dim, *radius, rng);
                (0..*arms)
                    .map(|i| embed_shared(c.as_slice(), i, *arms).expect("arm within range"))
                    .collect()
            }
        }
    }

    pub fn noisy_reward(&self, action: &DVector<f64>, rng: &mut dyn RngCore) -> f64 {
        let noise: f64 = StandardNormal.sample(rng);
        self.theta_star.dot(action) + self.noise_sigma * noise
    }
}

impl Environment for LinearEnvironment {
    fn family(&self) -> EnvFamily {
        EnvFamily::Linear
    }

    fn num_arms(&self) -> usize {
        self.actions.count()
    }

    fn context(&self, _t: usize, rng: &mut dyn RngCore) -> Context {
        Context::Actions(self.action_set(rng))
    }

    fn expected_rewards(&self, _t: usize, ctx: &Context) -> Vec<f64> {
        ctx.actions()
            .expect("linear round needs an action set")
            .iter()
            .map(|a| self.theta_star.dot(a))
            .collect()
    }

    fn pull(&self, _t: usize, ctx: &Context, arm: usize, rng: &mut dyn RngCore) -> Pull {
        let action = &ctx.actions().expect("linear round needs an action set")[arm];
        Pull::clean(self.noisy_reward(action, rng))
    }
}
