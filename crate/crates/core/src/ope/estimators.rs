use super::{HistoryPolicy, LogRecord, RewardModel, TargetPolicy};
use crate::error::{BanditError, Result};

fn check_log<P: TargetPolicy + ?Sized>(policy: &P, log: &[LogRecord]) -> Result<()> {
    if log.is_empty() {
        return Err(BanditError::UndefinedEstimate("empty log".into()));
    }
    for r in log {
        if r.context >= policy.num_contexts() {
            return Err(BanditError::IndexOutOfRange {
                index: r.context,
                len: policy.num_contexts(),
            });
        }
        if r.action >= policy.num_arms() {
            return Err(BanditError::IndexOutOfRange {
                index: r.action,
                len: policy.num_arms(),
            });
        }
    }
    Ok(())
}

/// Importance weight `pi(a_t | c_t) / pi_D(a_t | c_t)`.
fn weight<P: TargetPolicy + ?Sized>(policy: &P, r: &LogRecord) -> Result<f64> {
    let target = policy.prob(r.action, r.context);
    if r.propensity > 0.0 {
        Ok(target / r.propensity)
    } else if target > 0.0 {
        Err(BanditError::SupportViolation {
            context: r.context,
            action: r.action,
            target_prob: target,
            behavior_prop: r.propensity,
        })
    } else {
        Ok(0.0)
    }
}

fn plug_in<P: TargetPolicy + ?Sized, M: RewardModel + ?Sized>(policy: &P, model: &M, context: usize) -> f64 {
    (0..policy.num_arms())
        .map(|a| policy.prob(a, context) * model.r_hat(a, context))
        .sum()
}

/// Replay evaluation: keep the records where the policy, fed only the records
/// kept so far, agrees with the logged action, and average their rewards.
pub fn rejection_evaluate<H: HistoryPolicy + ?Sized>(policy: &mut H, log: &[LogRecord]) -> Result<f64> {
    if log.is_empty() {
        return Err(BanditError::UndefinedEstimate("empty log".into()));
    }
    let mut history: Vec<LogRecord> = Vec::new();
    let mut total = 0.0;
    for r in log {
        if policy.choose(&history, r.context) == r.action {
            total += r.reward;
            history.push(*r);
        }
    }
    if history.is_empty() {
        return Err(BanditError::UndefinedEstimate(
            "no logged action matched the evaluated policy".into(),
        ));
    }
    Ok(total / history.len() as f64)
}

/// `(1/T) sum_t w_t r_t`.
pub fn is_estimate<P: TargetPolicy + ?Sized>(policy: &P, log: &[LogRecord]) -> Result<f64> {
    check_log(policy, log)?;
    let mut total = 0.0;
    for r in log {
        total += weight(policy, r)? * r.reward;
    }
    Ok(total / log.len() as f64)
}

/// `sum_t w_t r_t / sum_t w_t`.
pub fn wis_estimate<P: TargetPolicy + ?Sized>(policy: &P, log: &[LogRecord]) -> Result<f64> {
    check_log(policy, log)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in log {
        let w = weight(policy, r)?;
        num += w * r.reward;
        den += w;
    }
    if den > 0.0 {
        Ok(num / den)
    } else {
        Err(BanditError::UndefinedEstimate("all importance weights are zero".into()))
    }
}

/// Plug-in value `(1/T) sum_t sum_a pi(a | c_t) r_hat(a, c_t)`.
pub fn reg_estimate<P: TargetPolicy + ?Sized, M: RewardModel + ?Sized>(
    policy: &P,
    log: &[LogRecord],
    model: &M,
) -> Result<f64> {
    check_log(policy, log)?;
    let total: f64 = log.iter().map(|r| plug_in(policy, model, r.context)).sum();
    Ok(total / log.len() as f64)
}

/// `(1/T) sum_t [w_t (r_t - r_hat(a_t, c_t)) + sum_a pi(a | c_t) r_hat(a, c_t)]`.
pub fn dr_estimate<P: TargetPolicy + ?Sized, M: RewardModel + ?Sized>(
    policy: &P,
    log: &[LogRecord],
    model: &M,
) -> Result<f64> {
    check_log(policy, log)?;
    let mut total = 0.0;
    for r in log {
        let correction = weight(policy, r)? * (r.reward - model.r_hat(r.action, r.context));
        total += correction + plug_in(policy, model, r.context);
    }
    Ok(total / log.len() as f64)
}

/// `V1 = sum_c lambda(c) sum_a pi(a|c)^2 / pi_D(a|c)`.
pub fn v1_diagnostic<P: TargetPolicy + ?Sized, B: TargetPolicy + ?Sized>(
    policy: &P,
    behavior: &B,
    context_dist: &[f64],
) -> Result<f64> {
    if policy.num_arms() != behavior.num_arms() {
        return Err(BanditError::invalid("target and behaviour policies have different arm counts"));
    }
    if context_dist.len() > policy.num_contexts() || context_dist.len() > behavior.num_contexts() {
        return Err(BanditError::invalid("context distribution covers more contexts than the policies"));
    }
    let mass: f64 = context_dist.iter().sum();
    if context_dist.iter().any(|&p| p < 0.0) || (mass - 1.0).abs() > 1e-9 {
        return Err(BanditError::invalid("context distribution must be a probability vector"));
    }
    let mut v1 = 0.0;
    for (c, &lambda) in context_dist.iter().enumerate() {
        for a in 0..policy.num_arms() {
            let p = policy.prob(a, c);
            let q = behavior.prob(a, c);
            if p == 0.0 {
                continue;
            }
            if q <= 0.0 {
                return Err(BanditError::SupportViolation {
                    context: c,
                    action: a,
                    target_prob: p,
                    behavior_prop: q,
                });
            }
            v1 += lambda * p * p / q;
        }
    }
    Ok(v1)
}

/// Minimax MSE lower bound `V1 (sigma^2 + R_max^2) / (700 T)`.
pub fn minimax_lower_value(v1: f64, sigma: f64, r_max: f64, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(BanditError::invalid("log length must be at least 1"));
    }
    Ok(v1 * (sigma * sigma + r_max * r_max) / (700.0 * horizon as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ope::{MissingCell, SampleAverageModel, TableModel, TablePolicy};
    use proptest::prelude::*;

    fn rec(c: usize, a: usize, r: f64, p: f64) -> LogRecord {
        LogRecord::new(c, a, r, p).unwrap()
    }

    #[test]
    fn rejection_examples() {
        let log = [rec(0, 0, 1.0, 0.5), rec(0, 1, 1.0, 0.5), rec(1, 1, 0.0, 0.5), rec(1, 0, 1.0, 0.5)];
        let mut p = TablePolicy::deterministic(&[0, 1], 2).unwrap();
        assert_eq!(rejection_evaluate(&mut p, &log).unwrap(), 0.5);
        let mut all = |_: &[LogRecord], c: usize| [0, 1, 1, 0][c];
        let log2 = [rec(0, 0, 0.2, 0.5), rec(1, 1, 0.4, 0.5)];
        assert!((rejection_evaluate(&mut all, &log2).unwrap() - 0.3).abs() < 1e-15);
        let mut none = |_: &[LogRecord], _: usize| 5;
        assert!(matches!(
            rejection_evaluate(&mut none, &log),
            Err(BanditError::UndefinedEstimate(_))
        ));
    }

    #[test]
    fn rejection_feeds_only_matched_history() {
        let log = [rec(0, 0, 1.0, 0.5), rec(0, 1, 0.0, 0.5), rec(0, 1, 0.5, 0.5)];
        let mut seen = Vec::new();
        // plays arm 0 until one record is accepted, then arm 1
        let mut p = |h: &[LogRecord], _c: usize| {
            seen.push(h.len());
            if h.is_empty() {
                0
            } else {
                1
            }
        };
        let v = rejection_evaluate(&mut p, &log).unwrap();
        assert!((v - (1.0 + 0.0 + 0.5) / 3.0).abs() < 1e-15);
        assert_eq!(seen, vec![0, 1, 2]);
    }

    #[test]
    fn is_examples() {
        let p = TablePolicy::deterministic(&[0], 2).unwrap();
        assert_eq!(is_estimate(&p, &[rec(0, 0, 1.0, 0.5)]).unwrap(), 2.0);
        let u = TablePolicy::uniform(1, 2).unwrap();
        let log = [rec(0, 0, 0.3, 0.5), rec(0, 1, 0.9, 0.5)];
        assert!((is_estimate(&u, &log).unwrap() - 0.6).abs() < 1e-15);
        let bad = [rec(0, 0, 1.0, 0.0)];
        assert!(matches!(is_estimate(&p, &bad), Err(BanditError::SupportViolation { .. })));
        assert!(is_estimate(&p, &[]).is_err());
    }

    #[test]
    fn wis_examples() {
        let p = TablePolicy::deterministic(&[0], 2).unwrap();
        assert_eq!(wis_estimate(&p, &[rec(0, 0, 1.0, 0.3)]).unwrap(), 1.0);
        let u = TablePolicy::uniform(1, 2).unwrap();
        let log = [rec(0, 0, 0.3, 0.5), rec(0, 1, 0.9, 0.5)];
        assert!((wis_estimate(&u, &log).unwrap() - 0.6).abs() < 1e-15);
        let skew = TablePolicy::new(vec![vec![0.9, 0.1]]).unwrap();
        let flat = [rec(0, 0, 0.7, 0.2), rec(0, 1, 0.7, 0.8), rec(0, 0, 0.7, 0.6)];
        assert!((wis_estimate(&skew, &flat).unwrap() - 0.7).abs() < 1e-15);
        assert!(wis_estimate(&p, &[rec(0, 1, 1.0, 0.5)]).is_err());
    }

    #[test]
    fn reg_and_dr_examples() {
        let p = TablePolicy::deterministic(&[0], 2).unwrap();
        let log = [rec(0, 0, 1.0, 0.5)];
        let half = TableModel::new(vec![vec![0.5, 0.5]]).unwrap();
        assert_eq!(dr_estimate(&p, &log, &half).unwrap(), 1.5);
        assert_eq!(reg_estimate(&p, &log, &TableModel::zeros(1, 2)).unwrap(), 0.0);

        let truth = TableModel::new(vec![vec![0.2, 0.8], vec![0.6, 0.1]]).unwrap();
        let target = TablePolicy::new(vec![vec![0.3, 0.7], vec![1.0, 0.0]]).unwrap();
        let log = [rec(0, 1, 0.0, 0.5), rec(1, 0, 1.0, 0.5), rec(0, 0, 1.0, 0.5)];
        let v = (2.0 * (0.3 * 0.2 + 0.7 * 0.8) + 0.6) / 3.0;
        assert!((reg_estimate(&target, &log, &truth).unwrap() - v).abs() < 1e-15);
    }

    #[test]
    fn sample_average_regression_is_empirical_propensity_is() {
        // 2 contexts, 2 arms, every cell observed
        let log = [
            rec(0, 0, 0.1, 0.5),
            rec(0, 1, 0.9, 0.5),
            rec(0, 1, 0.5, 0.5),
            rec(1, 0, 0.3, 0.5),
            rec(1, 1, 0.4, 0.5),
            rec(1, 0, 0.8, 0.5),
            rec(1, 0, 0.2, 0.5),
        ];
        let target = TablePolicy::new(vec![vec![0.25, 0.75], vec![0.6, 0.4]]).unwrap();
        let model = SampleAverageModel::fit(&log, 2, 2, MissingCell::Error).unwrap();
        let reg = reg_estimate(&target, &log, &model).unwrap();
        let mut ctx = [0usize; 2];
        let mut cell = [[0usize; 2]; 2];
        for r in &log {
            ctx[r.context] += 1;
            cell[r.context][r.action] += 1;
        }
        let identity: f64 = log
            .iter()
            .map(|r| {
                let pi_hat = cell[r.context][r.action] as f64 / ctx[r.context] as f64;
                target.prob(r.action, r.context) / pi_hat * r.reward
            })
            .sum::<f64>()
            / log.len() as f64;
        assert!((reg - identity).abs() < 1e-12);
    }

    #[test]
    fn v1_and_lower_bound_examples() {
        let b = TablePolicy::new(vec![vec![0.2, 0.8]]).unwrap();
        assert!((v1_diagnostic(&b, &b, &[1.0]).unwrap() - 1.0).abs() < 1e-15);
        let u = TablePolicy::uniform(1, 4).unwrap();
        let d = TablePolicy::deterministic(&[2], 4).unwrap();
        assert!((v1_diagnostic(&d, &u, &[1.0]).unwrap() - 4.0).abs() < 1e-12);
        let gap = TablePolicy::new(vec![vec![1.0, 0.0]]).unwrap();
        let tgt = TablePolicy::new(vec![vec![0.0, 1.0]]).unwrap();
        assert!(v1_diagnostic(&tgt, &gap, &[1.0]).is_err());

        let m = minimax_lower_value(4.0, 1.0, 1.0, 100).unwrap();
        assert!((m - 8.0 / 70000.0).abs() < 1e-18);
        assert!((m - 1.1429e-4).abs() < 1e-8);
        assert!(minimax_lower_value(4.0, 1.0, 1.0, 1 << 40).unwrap() < 1e-12);
        assert!((minimax_lower_value(8.0, 1.0, 1.0, 100).unwrap() - 2.0 * m).abs() < 1e-18);
    }

    fn table(k: usize, c: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(proptest::collection::vec(0.05f64..1.0, k), c).prop_map(|rows| {
            rows.into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|x| x / s).collect()
                })
                .collect()
        })
    }

    fn log_strategy() -> impl Strategy<Value = Vec<(usize, usize, f64, f64)>> {
        proptest::collection::vec((0usize..3, 0usize..3, 0.0f64..1.0, 0.01f64..=1.0), 1..40)
    }

    proptest! {
        #[test]
        fn v1_at_least_one(p in table(3, 3), q in table(3, 3), w in proptest::collection::vec(0.01f64..1.0, 3)) {
            let s: f64 = w.iter().sum();
            let lambda: Vec<f64> = w.iter().map(|x| x / s).collect();
            let v = v1_diagnostic(&TablePolicy::new(p).unwrap(), &TablePolicy::new(q).unwrap(), &lambda).unwrap();
            prop_assert!(v >= 1.0 - 1e-12);
        }

        #[test]
        fn dr_with_zero_model_is_exactly_is(p in table(3, 3), raw in log_strategy()) {
            let target = TablePolicy::new(p).unwrap();
            let log: Vec<LogRecord> = raw.iter().map(|&(c, a, r, q)| rec(c, a, r, q)).collect();
            let zero = TableModel::zeros(3, 3);
            prop_assert_eq!(dr_estimate(&target, &log, &zero).unwrap(), is_estimate(&target, &log).unwrap());
        }

        #[test]
        fn wis_within_reward_range(p in table(3, 3), raw in log_strategy()) {
            let target = TablePolicy::new(p).unwrap();
            let log: Vec<LogRecord> = raw.iter().map(|&(c, a, r, q)| rec(c, a, r, q)).collect();
            let lo = log.iter().map(|r| r.reward).fold(f64::INFINITY, f64::min);
            let hi = log.iter().map(|r| r.reward).fold(f64::NEG_INFINITY, f64::max);
            let v = wis_estimate(&target, &log).unwrap();
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }
}
