//! Bandit algorithms, off-policy estimators and a reproducible regret harness.

pub mod adversarial;
pub mod env;
pub mod episode;
pub mod error;
pub mod harness;
pub mod linear;
pub mod mab;
pub mod ope;
pub mod policy;
pub mod robust;
pub mod util;

pub use error::{BanditError, Result};
pub use policy::{Context, Policy};
