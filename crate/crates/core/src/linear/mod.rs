//! Linear and contextual-linear policies.

mod embed;
mod linucb;
mod olr;
mod ridge;

pub use embed::{embed_per_arm, embed_shared};
pub use linucb::{linucb_radius, linucb_select, ConfidenceSpec, LinUcb, RadiusMode};
pub use olr::{online_to_confidence_beta, FixedPredictor, OlrUcb, OnlinePredictor, RidgePredictor};
pub use ridge::RidgeState;

use nalgebra::DVector;

use crate::policy::Context;

pub(crate) fn round_actions<'a>(ctx: &'a Context, who: &str) -> &'a [DVector<f64>] {
    ctx.actions()
        .unwrap_or_else(|| panic!("{who} needs an action-set context, got {ctx:?}"))
}
