//! The contract shared by every online policy and environment.

use nalgebra::DVector;
use rand::RngCore;

use crate::error::Result;

/// Side information revealed at the start of a round.
#[derive(Debug, Clone, PartialEq)]
pub enum Context {
    /// Plain multi-armed rounds.
    None,
    /// A key into a finite context set.
    Discrete(usize),
    /// The round's action set for linear bandits.
    Actions(Vec<DVector<f64>>),
}

impl Context {
    pub fn discrete(&self) -> Option<usize> {
        match self {
            Context::Discrete(c) => Some(*c),
            _ => None,
        }
    }

    pub fn actions(&self) -> Option<&[DVector<f64>]> {
        match self {
            Context::Actions(a) => Some(a),
            _ => None,
        }
    }
}

/// A sequential decision rule mapping the history to an arm.
///
/// `t` is the 1-based round index. Implementations keep whatever sufficient
/// statistics they need; `select` must be deterministic given internal state,
/// inputs and the generator state.
pub trait Policy: Send {
    fn name(&self) -> String;

    fn select(&mut self, t: usize, ctx: &Context, rng: &mut dyn RngCore) -> usize;

    fn update(&mut self, t: usize, ctx: &Context, arm: usize, reward: f64) -> Result<()>;

    /// Forget all history.
    fn reset(&mut self);
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn select(&mut self, t: usize, ctx: &Context, rng: &mut dyn RngCore) -> usize {
        (**self).select(t, ctx, rng)
    }

    fn update(&mut self, t: usize, ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        (**self).update(t, ctx, arm, reward)
    }

    fn reset(&mut self) {
        (**self).reset()
    }
}
