use log::warn;
use rand::RngCore;
use rayon::prelude::*;

use super::regret::{regret_from_trace, RegretKind};
use crate::env::BanditInstance;
use crate::episode::run_episode_with;
use crate::error::{BanditError, Result};
use crate::policy::Policy;
use crate::util::{replication_seed, rng_from_seed};

/// Least-squares slope of `ln(regret)` against `ln(T)`. Non-positive points are
/// skipped with a warning; at least three must remain.
pub fn scaling_exponent_fit(points: &[(f64, f64)]) -> Result<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(t, r)| {
            let ok = t > 0.0 && r > 0.0 && t.is_finite() && r.is_finite();
            if !ok {
                warn!("scaling fit: dropping point ({t}, {r})");
            }
            ok
        })
        .map(|&(t, r)| (t.ln(), r.ln()))
        .collect();
    if usable.len() < 3 {
        return Err(BanditError::invalid(format!(
            "scaling fit needs at least 3 positive points, got {}",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(BanditError::invalid("scaling fit needs at least two distinct horizons"));
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

/// `(sum_{gap > 0} 2 / gap) ln T`.
pub fn asymptotic_lb_reference(instance: &BanditInstance, horizon: f64) -> Result<f64> {
    let coef: f64 = instance.gaps().iter().filter(|&&g| g > 0.0).map(|g| 2.0 / g).sum();
    if coef == 0.0 {
        return Err(BanditError::invalid("every arm is optimal; no suboptimal gap"));
    }
    Ok(coef * horizon.ln())
}

/// Monte Carlo Bayesian regret: average final pseudo-regret over instances
/// drawn from `prior`, one instance per replication.
pub fn bayes_regret_estimate<S, F>(
    prior: S,
    make_policy: F,
    horizon: usize,
    n_rep: usize,
    seed: u64,
) -> Result<f64>
where
    S: Fn(&mut dyn RngCore) -> Result<BanditInstance> + Sync,
    F: Fn(usize) -> Result<Box<dyn Policy>> + Sync,
{
    if n_rep == 0 {
        return Err(BanditError::invalid("need at least one replication"));
    }
    let finals = (0..n_rep as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rng_from_seed(replication_seed(seed, rep));
            let instance = prior(&mut rng)?;
            let mut policy = make_policy(instance.num_arms())?;
            let trace = run_episode_with(&instance, &mut policy, horizon, &mut rng)?;
            let curve = regret_from_trace(&trace, RegretKind::Stochastic)?;
            Ok(curve.last().copied().unwrap_or(0.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(finals.iter().sum::<f64>() / n_rep as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mab::Ucb;

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5].iter().map(|&t: &f64| (t, t.sqrt())).collect();
        assert!((scaling_exponent_fit(&pts).unwrap() - 0.5).abs() < 1e-12);
        let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5].iter().map(|&t: &f64| (t, t.powf(2.0 / 3.0))).collect();
        assert!((scaling_exponent_fit(&pts).unwrap() - 0.6667).abs() < 1e-4);
        assert!(scaling_exponent_fit(&[(10.0, 1.0), (100.0, 0.0), (1000.0, 3.0)]).is_err());
    }

    #[test]
    fn lower_bound_reference() {
        let e = std::f64::consts::E;
        let a = BanditInstance::gaussian(&[0.5, 0.0]).unwrap();
        assert!((asymptotic_lb_reference(&a, e).unwrap() - 4.0).abs() < 1e-12);
        let b = BanditInstance::gaussian(&[1.0, 0.0, 0.0]).unwrap();
        assert!((asymptotic_lb_reference(&b, e * e).unwrap() - 8.0).abs() < 1e-12);
        let doubled = BanditInstance::gaussian(&[1.0, 0.0]).unwrap();
        assert!((asymptotic_lb_reference(&doubled, 10.0).unwrap() * 2.0 - asymptotic_lb_reference(&a, 10.0).unwrap()).abs() < 1e-12);
        assert!(asymptotic_lb_reference(&BanditInstance::gaussian(&[0.3, 0.3]).unwrap(), 10.0).is_err());
    }

    #[test]
    fn point_mass_prior_is_plain_monte_carlo() {
        let inst = BanditInstance::gaussian(&[0.5, 0.2]).unwrap();
        let make = |k: usize| -> Result<Box<dyn Policy>> { Ok(Box::new(Ucb::new(k, 0.01)?)) };
        let bayes = bayes_regret_estimate(|_| Ok(inst.clone()), make, 500, 20, 3).unwrap();
        let mut direct = 0.0;
        for rep in 0..20 {
            let mut rng = rng_from_seed(replication_seed(3, rep));
            let mut p = Ucb::new(2, 0.01).unwrap();
            let tr = run_episode_with(&inst, &mut p, 500, &mut rng).unwrap();
            direct += regret_from_trace(&tr, RegretKind::Stochastic).unwrap().last().unwrap();
        }
        assert!((bayes - direct / 20.0).abs() < 1e-9);
    }
}
