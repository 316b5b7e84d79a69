use serde::{Deserialize, Serialize};

use crate::adversarial::ExpertSet;
use crate::episode::Trace;
use crate::error::{BanditError, Result};

/// Which notion of regret to compute from a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretKind {
    /// `t mu* - sum mu_{A_s}` on a stationary environment (pseudo-regret).
    Stochastic,
    /// Best fixed arm in hindsight over each prefix, on the per-round means.
    Adversarial,
    /// Per-round best arm: `sum_s (max_a mu_{a,s} - mu_{A_s,s})`.
    Dynamic,
    /// Pseudo-regret on clean means of a corrupted environment.
    Uncontaminated,
    /// `sum_s (max_a mu_{a,s} - R_s)` with the observed rewards.
    Realized,
}

fn is_stationary(trace: &Trace) -> bool {
    trace.len() < 2 || (2..=trace.len()).all(|t| trace.means_at(t) == trace.means_at(1))
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Cumulative regret after each round.
pub fn regret_from_trace(trace: &Trace, kind: RegretKind) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(trace.len());
    match kind {
        RegretKind::Stochastic | RegretKind::Uncontaminated => {
            if !is_stationary(trace) {
                return Err(BanditError::Config(
                    "stochastic regret needs a stationary environment; use dynamic or adversarial".into(),
                ));
            }
            let mut total = 0.0;
            for s in &trace.steps {
                let row = trace.means_at(s.t);
                total += max_of(row) - row[s.arm];
                out.push(total);
            }
        }
        RegretKind::Dynamic => {
            let mut total = 0.0;
            for s in &trace.steps {
                let row = trace.means_at(s.t);
                total += max_of(row) - row[s.arm];
                out.push(total);
            }
        }
        RegretKind::Realized => {
            let mut total = 0.0;
            for s in &trace.steps {
                total += max_of(trace.means_at(s.t)) - s.reward;
                out.push(total);
            }
        }
        RegretKind::Adversarial => {
            let mut per_arm = vec![0.0; trace.num_arms()];
            let mut collected = 0.0;
            for s in &trace.steps {
                let row = trace.means_at(s.t);
                for (acc, r) in per_arm.iter_mut().zip(row) {
                    *acc += r;
                }
                collected += row[s.arm];
                out.push(max_of(&per_arm) - collected);
            }
        }
    }
    Ok(out)
}

/// Regret against the best expert in hindsight:
/// `max_pi sum_s mu_{pi(c_s), s} - sum_s mu_{A_s, s}` after each round.
pub fn expert_regret(trace: &Trace, experts: &ExpertSet) -> Result<Vec<f64>> {
    let mut per_expert = vec![0.0; experts.len()];
    let mut collected = 0.0;
    let mut out = Vec::with_capacity(trace.len());
    for s in &trace.steps {
        let row = trace.means_at(s.t);
        let c = s.context.unwrap_or(0);
        for (e, acc) in per_expert.iter_mut().enumerate() {
            *acc += row[experts.recommend(e, c)?];
        }
        collected += row[s.arm];
        out.push(max_of(&per_expert) - collected);
    }
    Ok(out)
}

/// Mean and standard error of cumulative regret across replications.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub kind: RegretKind,
    pub n_rep: usize,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl RegretCurve {
    pub fn from_reps(kind: RegretKind, reps: &[Vec<f64>]) -> Result<Self> {
        let n = reps.len();
        let Some(first) = reps.first() else {
            return Ok(Self {
                kind,
                n_rep: 0,
                mean: Vec::new(),
                stderr: Vec::new(),
            });
        };
        let len = first.len();
        if reps.iter().any(|r| r.len() != len) {
            return Err(BanditError::invalid("replications have different lengths"));
        }
        let mut mean = vec![0.0; len];
        let mut stderr = vec![0.0; len];
        for t in 0..len {
            let (m, se) = mean_stderr(reps.iter().map(|r| r[t]));
            mean[t] = m;
            stderr[t] = se;
        }
        Ok(Self {
            kind,
            n_rep: n,
            mean,
            stderr,
        })
    }

    pub fn final_mean(&self) -> Option<f64> {
        self.mean.last().copied()
    }

    pub fn final_stderr(&self) -> Option<f64> {
        self.stderr.last().copied()
    }
}

/// Sample mean and standard error `s / sqrt(n)` (zero for a single value).
pub fn mean_stderr(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let xs: Vec<f64> = values.into_iter().collect();
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{BanditInstance, PiecewiseEnvironment, RewardTable};
    use crate::episode::run_episode;
    use crate::mab::Ucb;
    use crate::policy::{Context, Policy};
    use proptest::prelude::*;
    use rand::RngCore;

    struct Fixed(usize);
    impl Policy for Fixed {
        fn name(&self) -> String {
            "fixed".into()
        }
        fn select(&mut self, _t: usize, _c: &Context, _r: &mut dyn RngCore) -> usize {
            self.0
        }
        fn update(&mut self, _t: usize, _c: &Context, _a: usize, _r: f64) -> Result<()> {
            Ok(())
        }
        fn reset(&mut self) {}
    }

    #[test]
    fn optimal_play_has_zero_regret() {
        let env = BanditInstance::gaussian(&[0.1, 0.9, 0.3]).unwrap();
        let tr = run_episode(&env, &mut Fixed(1), 100, 0).unwrap();
        assert!(regret_from_trace(&tr, RegretKind::Stochastic).unwrap().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn best_fixed_arm_in_hindsight() {
        let table = RewardTable::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let tr = run_episode(&table, &mut Fixed(1), 2, 0).unwrap();
        assert_eq!(regret_from_trace(&tr, RegretKind::Adversarial).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn stochastic_rejects_changing_means() {
        let env = PiecewiseEnvironment::new(vec![
            (1, BanditInstance::gaussian(&[0.0, 1.0]).unwrap()),
            (3, BanditInstance::gaussian(&[1.0, 0.0]).unwrap()),
        ])
        .unwrap();
        let tr = run_episode(&env, &mut Fixed(1), 4, 0).unwrap();
        assert!(regret_from_trace(&tr, RegretKind::Stochastic).is_err());
        assert_eq!(regret_from_trace(&tr, RegretKind::Dynamic).unwrap(), vec![0.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn curve_statistics() {
        let c = RegretCurve::from_reps(RegretKind::Stochastic, &[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(c.mean, vec![2.0, 3.0]);
        assert!((c.stderr[0] - 1.0).abs() < 1e-12);
        assert_eq!(RegretCurve::from_reps(RegretKind::Stochastic, &[]).unwrap().n_rep, 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn stochastic_regret_monotone_and_equal_to_dynamic(
            means in proptest::collection::vec(-1.0f64..1.0, 2..6),
            seed in any::<u64>(),
        ) {
            let env = BanditInstance::gaussian(&means).unwrap();
            let mut p = Ucb::new(means.len(), 0.01).unwrap();
            let tr = run_episode(&env, &mut p, 300, seed).unwrap();
            let s = regret_from_trace(&tr, RegretKind::Stochastic).unwrap();
            let d = regret_from_trace(&tr, RegretKind::Dynamic).unwrap();
            prop_assert_eq!(&s, &d);
            prop_assert!(s[0] >= 0.0);
            prop_assert!(s.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}
