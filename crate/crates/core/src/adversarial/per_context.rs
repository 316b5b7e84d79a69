use std::collections::BTreeMap;

use rand::RngCore;

use crate::error::Result;
use crate::policy::{Context, Policy};

type Factory = Box<dyn Fn() -> Box<dyn Policy> + Send>;

/// One independent bandit per discrete context, created on first sight.
///
/// Each inner policy sees `Context::None` and its own round counter.
pub struct PerContext {
    factory: Factory,
    inner: BTreeMap<usize, (Box<dyn Policy>, usize)>,
    label: String,
}

impl PerContext {
    pub fn new(factory: impl Fn() -> Box<dyn Policy> + Send + 'static) -> Self {
        let label = format!("per_context_{}", factory().name());
        Self {
            factory: Box::new(factory),
            inner: BTreeMap::new(),
            label,
        }
    }

    pub fn contexts_seen(&self) -> usize {
        self.inner.len()
    }

    fn slot(&mut self, ctx: &Context) -> &mut (Box<dyn Policy>, usize) {
        let key = ctx.discrete().unwrap_or(0);
        let factory = &self.factory;
        self.inner.entry(key).or_insert_with(|| (factory(), 0))
    }
}

impl Policy for PerContext {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn select(&mut self, _t: usize, ctx: &Context, rng: &mut dyn RngCore) -> usize {
        let (policy, rounds) = self.slot(ctx);
        policy.select(*rounds + 1, &Context::None, rng)
    }

    fn update(&mut self, _t: usize, ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        let (policy, rounds) = self.slot(ctx);
        *rounds += 1;
        policy.update(*rounds, &Context::None, arm, reward)
    }

    fn reset(&mut self) {
        self.inner.clear();
    }
}
