//! Adversarial bandit policies and expert-advice wrappers.

mod exp3;
mod exp4;
mod per_context;

pub use exp3::{exp3_default_eta, exp3ix_default_gamma, exp3ix_loss, iw_estimator_v1, iw_estimator_v2, Exp3, Exp3Ix, Exp3State};
pub use exp4::{exp4_default_eta, Exp4, Exp4State, ExpertSet};
pub use per_context::PerContext;
