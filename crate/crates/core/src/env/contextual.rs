use rand::RngCore;

use super::{BanditInstance, EnvFamily, Environment, Pull, RewardTable};
use crate::error::{BanditError, Result};
use crate::policy::Context;
use crate::util::sample_index;

/// Finite-context bandit. Contexts are drawn i.i.d. from `context_probs`
/// (random mode) or read from a fixed sequence paired with a reward table
/// (oblivious mode).
#[derive(Debug, Clone, PartialEq)]
pub enum ContextualInstance {
    Random {
        context_probs: Vec<f64>,
        instances: Vec<BanditInstance>,
    },
    Oblivious {
        contexts: Vec<usize>,
        table: RewardTable,
        num_contexts: usize,
    },
}

impl ContextualInstance {
    pub fn random(context_probs: Vec<f64>, instances: Vec<BanditInstance>) -> Result<Self> {
        if context_probs.len() != instances.len() || instances.is_empty() {
            return Err(BanditError::invalid(
                "need one bandit instance per context and at least one context",
            ));
        }
        let total: f64 = context_probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 || context_probs.iter().any(|p| *p < 0.0) {
            return Err(BanditError::invalid("context probabilities must form a distribution"));
        }
        let k = instances[0].num_arms();
        if instances.iter().any(|i| i.num_arms() != k) {
            return Err(BanditError::invalid("all contexts must share the arm count"));
        }
        Ok(ContextualInstance::Random {
            context_probs,
            instances,
        })
    }

    pub fn oblivious(contexts: Vec<usize>, table: RewardTable, num_contexts: usize) -> Result<Self> {
        if contexts.len() != table.horizon() {
            return Err(BanditError::invalid("context sequence and reward table lengths differ"));
        }
        if contexts.iter().any(|&c| c >= num_contexts) {
            return Err(BanditError::invalid("context key out of range"));
        }
        Ok(ContextualInstance::Oblivious {
            contexts,
            table,
            num_contexts,
        })
    }

    pub fn num_contexts(&self) -> usize {
        match self {
            ContextualInstance::Random { instances, .. } => instances.len(),
            ContextualInstance::Oblivious { num_contexts, .. } => *num_contexts,
        }
    }
}

impl Environment for ContextualInstance {
    fn family(&self) -> EnvFamily {
        EnvFamily::Contextual
    }

    fn num_arms(&self) -> usize {
        match self {
            ContextualInstance::Random { instances, .. } => instances[0].num_arms(),
            ContextualInstance::Oblivious { table, .. } => table.num_arms(),
        }
    }

    fn max_horizon(&self) -> Option<usize> {
        match self {
            ContextualInstance::Random { .. } => None,
            ContextualInstance::Oblivious { contexts, .. } => Some(contexts.len()),
        }
    }

    fn context(&self, t: usize, rng: &mut dyn RngCore) -> Context {
        match self {
            ContextualInstance::Random { context_probs, .. } => {
                Context::Discrete(sample_index(context_probs, rng))
            }
            ContextualInstance::Oblivious { contexts, .. } => Context::Discrete(contexts[t - 1]),
        }
    }

    fn expected_rewards(&self, t: usize, ctx: &Context) -> Vec<f64> {
        match self {
            ContextualInstance::Random { instances, .. } => {
                instances[ctx.discrete().expect("contextual round needs a context")].means()
            }
            ContextualInstance::Oblivious { table, .. } => table.row(t).to_vec(),
        }
    }

    fn pull(&self, t: usize, ctx: &Context, arm: usize, rng: &mut dyn RngCore) -> Pull {
        match self {
            ContextualInstance::Random { instances, .. } => {
                let c = ctx.discrete().expect("contextual round needs a context");
                Pull::clean(instances[c].arms()[arm].sample(rng))
            }
            ContextualInstance::Oblivious { table, .. } => Pull::clean(table.row(t)[arm]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rng_from_seed;

    #[test]
    fn random_contexts_follow_their_distribution() {
        let env = ContextualInstance::random(
            vec![0.25, 0.75],
            vec![
                BanditInstance::bernoulli(&[0.9, 0.1]).unwrap(),
                BanditInstance::bernoulli(&[0.1, 0.9]).unwrap(),
            ],
        )
        .unwrap();
        let mut rng = rng_from_seed(5);
        let n = 20_000;
        let ones = (1..=n)
            .filter(|&t| env.context(t, &mut rng) == Context::Discrete(1))
            .count();
        assert!((ones as f64 / n as f64 - 0.75).abs() < 0.02);
        assert_eq!(env.expected_rewards(1, &Context::Discrete(1)), vec![0.1, 0.9]);
    }

    #[test]
    fn oblivious_replays_sequence() {
        let table = RewardTable::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let env = ContextualInstance::oblivious(vec![1, 0], table, 2).unwrap();
        let mut rng = rng_from_seed(0);
        assert_eq!(env.context(1, &mut rng), Context::Discrete(1));
        assert_eq!(env.context(2, &mut rng), Context::Discrete(0));
        assert_eq!(env.pull(2, &Context::Discrete(0), 1, &mut rng).observed, 1.0);
        assert_eq!(env.max_horizon(), Some(2));
    }
}
