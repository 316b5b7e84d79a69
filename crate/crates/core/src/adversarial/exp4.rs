use rand::RngCore;

use super::iw_estimator_v2;
use crate::error::{BanditError, Result};
use crate::mab::check_arms;
use crate::policy::{Context, Policy};
use crate::util::{sample_index, softmax};

/// `sqrt(2 ln |experts| / (T K))`.
pub fn exp4_default_eta(num_experts: usize, k: usize, horizon: usize) -> f64 {
    (2.0 * (num_experts as f64).ln() / (horizon.max(1) as f64 * k as f64)).sqrt()
}

/// A finite set of deterministic experts, each a table `context -> arm`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertSet {
    tables: Vec<Vec<usize>>,
    num_arms: usize,
}

impl ExpertSet {
    pub fn new(tables: Vec<Vec<usize>>, num_arms: usize) -> Result<Self> {
        check_arms(num_arms)?;
        let Some(first) = tables.first() else {
            return Err(BanditError::invalid("expert set is empty"));
        };
        let contexts = first.len();
        if contexts == 0 {
            return Err(BanditError::invalid("experts must cover at least one context"));
        }
        for (i, t) in tables.iter().enumerate() {
            if t.len() != contexts {
                return Err(BanditError::invalid(format!(
                    "expert {i} covers {} contexts, expected {contexts}",
                    t.len()
                )));
            }
            if let Some(&bad) = t.iter().find(|&&a| a >= num_arms) {
                return Err(BanditError::IndexOutOfRange { index: bad, len: num_arms });
            }
        }
        Ok(Self { tables, num_arms })
    }

    /// One expert per arm, always recommending that arm.
    pub fn constant(num_arms: usize, num_contexts: usize) -> Result<Self> {
        Self::new(
            (0..num_arms).map(|a| vec![a; num_contexts.max(1)]).collect(),
            num_arms,
        )
    }

    /// Every map from `num_contexts` contexts to `num_arms` arms.
    pub fn all_maps(num_contexts: usize, num_arms: usize) -> Result<Self> {
        let total = (num_arms as u64)
            .checked_pow(num_contexts as u32)
            .filter(|&n| n <= 1 << 20)
            .ok_or_else(|| BanditError::invalid("too many context-to-arm maps to enumerate"))?;
        let tables = (0..total)
            .map(|mut code| {
                (0..num_contexts)
                    .map(|_| {
                        let a = (code % num_arms as u64) as usize;
                        code /= num_arms as u64;
                        a
                    })
                    .collect()
            })
            .collect();
        Self::new(tables, num_arms)
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn num_contexts(&self) -> usize {
        self.tables[0].len()
    }

    pub fn recommend(&self, expert: usize, context: usize) -> Result<usize> {
        let table = self
            .tables
            .get(expert)
            .ok_or(BanditError::IndexOutOfRange { index: expert, len: self.tables.len() })?;
        table
            .get(context)
            .copied()
            .ok_or(BanditError::IndexOutOfRange { index: context, len: table.len() })
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }
}

/// Expert weights `Q` of EXP4, kept as cumulative estimated expert rewards.
#[derive(Debug, Clone)]
pub struct Exp4State {
    scores: Vec<f64>,
    eta: f64,
}

impl Exp4State {
    pub fn new(num_experts: usize, eta: f64) -> Result<Self> {
        if num_experts == 0 {
            return Err(BanditError::invalid("expert set is empty"));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(BanditError::invalid(format!("learning rate {eta} must be finite and non-negative")));
        }
        Ok(Self {
            scores: vec![0.0; num_experts],
            eta,
        })
    }

    pub fn weights(&self) -> Vec<f64> {
        softmax(&self.scores, self.eta)
    }

    /// Arm distribution `P_i = sum_pi Q_pi 1{pi(c) = i}`.
    pub fn arm_probs(&self, experts: &ExpertSet, context: usize) -> Result<Vec<f64>> {
        self.check(experts)?;
        let q = self.weights();
        let mut p = vec![0.0; experts.num_arms()];
        for (e, qe) in q.iter().enumerate() {
            p[experts.recommend(e, context)?] += qe;
        }
        Ok(p)
    }

    pub fn step(
        &self,
        experts: &ExpertSet,
        context: usize,
        rng: &mut dyn RngCore,
    ) -> Result<(Vec<f64>, usize)> {
        let p = self.arm_probs(experts, context)?;
        let arm = sample_index(&p, rng);
        Ok((p, arm))
    }

    pub fn update(
        &mut self,
        experts: &ExpertSet,
        context: usize,
        chosen: usize,
        reward: f64,
        probs: &[f64],
    ) -> Result<()> {
        self.check(experts)?;
        let p_chosen = probs.get(chosen).copied().unwrap_or(0.0);
        if !(p_chosen > 0.0) {
            return Err(BanditError::InvariantViolation(format!(
                "EXP4 update with P[chosen] = {p_chosen}"
            )));
        }
        for (e, s) in self.scores.iter_mut().enumerate() {
            let rec = experts.recommend(e, context)?;
            // Non-chosen recommendations score exactly 1 whatever their probability,
            // so an underflowed P[rec] = 0 must not reach the estimator.
            *s += iw_estimator_v2(chosen, rec, reward, p_chosen.min(1.0))?;
        }
        Ok(())
    }

    fn check(&self, experts: &ExpertSet) -> Result<()> {
        if experts.len() == self.scores.len() {
            Ok(())
        } else {
            Err(BanditError::invalid(format!(
                "state tracks {} experts, expert set has {}",
                self.scores.len(),
                experts.len()
            )))
        }
    }

    pub fn reset(&mut self) {
        self.scores.iter_mut().for_each(|s| *s = 0.0);
    }
}

/// EXP4 on discrete contexts (`Context::None` is read as context 0).
#[derive(Debug, Clone)]
pub struct Exp4 {
    experts: ExpertSet,
    state: Exp4State,
    probs: Vec<f64>,
}

impl Exp4 {
    pub fn new(experts: ExpertSet, eta: f64) -> Result<Self> {
        let state = Exp4State::new(experts.len(), eta)?;
        Ok(Self {
            probs: vec![0.0; experts.num_arms()],
            experts,
            state,
        })
    }

    pub fn for_horizon(experts: ExpertSet, horizon: usize) -> Result<Self> {
        let eta = exp4_default_eta(experts.len(), experts.num_arms(), horizon);
        Self::new(experts, eta)
    }

    pub fn state(&self) -> &Exp4State {
        &self.state
    }

    pub fn last_probs(&self) -> &[f64] {
        &self.probs
    }
}

fn context_key(ctx: &Context) -> usize {
    ctx.discrete().unwrap_or(0)
}

impl Policy for Exp4 {
    fn name(&self) -> String {
        "exp4".into()
    }

    fn select(&mut self, _t: usize, ctx: &Context, rng: &mut dyn RngCore) -> usize {
        let (p, arm) = self
            .state
            .step(&self.experts, context_key(ctx), rng)
            .unwrap_or_else(|e| panic!("EXP4 cannot act on {ctx:?}: {e}"));
        self.probs = p;
        arm
    }

    fn update(&mut self, _t: usize, ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        self.state
            .update(&self.experts, context_key(ctx), arm, reward, &self.probs)
    }

    fn reset(&mut self) {
        self.state.reset();
    }
}
