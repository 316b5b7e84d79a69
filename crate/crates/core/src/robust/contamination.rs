use rand::RngCore;

use crate::env::CorruptedEnvironment;
use crate::error::{BanditError, Result};
use crate::mab::{check_arms, check_delta, confidence_width, ArmStats};
use crate::policy::{Context, Policy};
use crate::util::argmax;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustConfig {
    /// Fraction trimmed from each tail, in [0, 0.5).
    pub trim_fraction: f64,
    /// Assumed upper bound on the corruption rate, in [0, 1).
    pub eta_bound: f64,
}

impl RobustConfig {
    pub fn new(trim_fraction: f64, eta_bound: f64) -> Result<Self> {
        check_trim(trim_fraction)?;
        if !(0.0..1.0).contains(&eta_bound) {
            return Err(BanditError::invalid(format!("eta bound {eta_bound} must lie in [0, 1)")));
        }
        Ok(Self {
            trim_fraction,
            eta_bound,
        })
    }
}

fn check_trim(f: f64) -> Result<()> {
    if (0.0..0.5).contains(&f) {
        Ok(())
    } else {
        Err(BanditError::invalid(format!("trim fraction {f} must lie in [0, 0.5)")))
    }
}

fn sorted_trimmed_mean(sorted: &[f64], trim: f64) -> f64 {
    let n = sorted.len();
    let drop = (trim * n as f64).ceil() as usize;
    if 2 * drop >= n {
        let mid = n / 2;
        return if n % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
    }
    let kept = &sorted[drop..n - drop];
    kept.iter().sum::<f64>() / kept.len() as f64
}

/// Symmetric trimmed mean dropping `ceil(trim n)` samples from each end;
/// the median when that would drop everything.
pub fn trimmed_mean(samples: &[f64], trim: f64) -> Result<f64> {
    check_trim(trim)?;
    if samples.is_empty() {
        return Err(BanditError::invalid("trimmed mean of no samples"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(BanditError::invalid("trimmed mean of NaN"));
    }
    if trim == 0.0 {
        return Ok(samples.iter().sum::<f64>() / samples.len() as f64);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted_trimmed_mean(&sorted, trim))
}

/// Trimmed mean plus the plain UCB width; `+inf` for an unplayed arm.
pub fn cr_ucb_index(stats: &ArmStats, delta: f64, robust: &RobustConfig) -> Result<f64> {
    check_delta(delta)?;
    if stats.count() == 0 {
        return Ok(f64::INFINITY);
    }
    let samples = stats
        .samples()
        .ok_or_else(|| BanditError::invalid("robust index needs retained samples"))?;
    Ok(trimmed_mean(samples, robust.trim_fraction)? + confidence_width(stats.count(), delta))
}

/// UCB on trimmed means. Samples are kept sorted so only the played arm's
/// index is recomputed each round.
#[derive(Debug, Clone)]
pub struct CrUcb {
    delta: f64,
    robust: RobustConfig,
    stats: Vec<ArmStats>,
    sorted: Vec<Vec<f64>>,
    index: Vec<f64>,
}

impl CrUcb {
    pub fn new(k: usize, delta: f64, robust: RobustConfig) -> Result<Self> {
        check_arms(k)?;
        check_delta(delta)?;
        check_trim(robust.trim_fraction)?;
        Ok(Self {
            delta,
            robust,
            stats: vec![ArmStats::retaining(); k],
            sorted: vec![Vec::new(); k],
            index: vec![f64::INFINITY; k],
        })
    }

    fn refresh(&mut self, arm: usize) {
        let s = &self.stats[arm];
        let centre = if self.robust.trim_fraction == 0.0 {
            s.mean().expect("arm just played")
        } else {
            sorted_trimmed_mean(&self.sorted[arm], self.robust.trim_fraction)
        };
        self.index[arm] = centre + confidence_width(s.count(), self.delta);
    }
}

impl Policy for CrUcb {
    fn name(&self) -> String {
        "cr_ucb".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        argmax(&self.index)
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        if reward.is_nan() {
            return Err(BanditError::invalid("NaN reward"));
        }
        self.stats[arm].record(reward);
        let buf = &mut self.sorted[arm];
        let pos = buf.partition_point(|&x| x <= reward);
        buf.insert(pos, reward);
        self.refresh(arm);
        Ok(())
    }

    fn reset(&mut self) {
        self.stats.iter_mut().for_each(ArmStats::clear);
        self.sorted.iter_mut().for_each(Vec::clear);
        self.index.iter_mut().for_each(|x| *x = f64::INFINITY);
    }
}

/// Pseudo-regret against the clean means: `sum_t (mu* - mu_{A_t})`.
pub fn uncontaminated_regret(arms: &[usize], env: &CorruptedEnvironment) -> Result<f64> {
    let means = env.base().means();
    let best = env.base().best_mean();
    let mut total = 0.0;
    for &a in arms {
        let m = means
            .get(a)
            .ok_or(BanditError::IndexOutOfRange { index: a, len: means.len() })?;
        total += best - m;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{BanditInstance, Corruption};
    use crate::episode::run_episode;
    use crate::mab::{ucb_index, Ucb};
    use proptest::prelude::*;

    #[test]
    fn trimmed_mean_examples() {
        assert_eq!(trimmed_mean(&[0.0, 1.0, 1.0, 1.0, 100.0], 0.2).unwrap(), 1.0);
        assert_eq!(trimmed_mean(&[0.0, 1.0, 2.0, 5.0], 0.0).unwrap(), 2.0);
        assert_eq!(trimmed_mean(&[0.3; 7], 0.4).unwrap(), 0.3);
        assert!(trimmed_mean(&[], 0.1).is_err());
        assert!(trimmed_mean(&[1.0], 0.5).is_err());
        // everything would be dropped: median
        assert_eq!(trimmed_mean(&[3.0, 1.0], 0.3).unwrap(), 2.0);
    }

    #[test]
    fn cr_ucb_examples() {
        let robust = RobustConfig::new(0.25, 0.1).unwrap();
        let s = ArmStats::from_samples(&[0.5, 0.5, 0.5, 100.0]);
        let idx = cr_ucb_index(&s, 0.1, &robust).unwrap();
        assert!((idx - (0.5 + confidence_width(4, 0.1))).abs() < 1e-15);
        assert_eq!(cr_ucb_index(&ArmStats::retaining(), 0.1, &robust).unwrap(), f64::INFINITY);
        let plain = RobustConfig::new(0.0, 0.0).unwrap();
        let clean = ArmStats::from_samples(&[0.1, 0.7, 0.4]);
        assert_eq!(cr_ucb_index(&clean, 0.1, &plain).unwrap(), ucb_index(&clean, 0.1).unwrap());
    }

    #[test]
    fn zero_trim_trace_is_ucb_trace() {
        let base = BanditInstance::gaussian(&[0.9, 0.8, 0.7]).unwrap();
        let env = CorruptedEnvironment::new(base, 0.05, Corruption::constant(100.0)).unwrap();
        let mut cr = CrUcb::new(3, 1e-3, RobustConfig::new(0.0, 0.05).unwrap()).unwrap();
        let mut ucb = Ucb::new(3, 1e-3).unwrap();
        assert_eq!(run_episode(&env, &mut cr, 3000, 5).unwrap(), run_episode(&env, &mut ucb, 3000, 5).unwrap());
    }

    #[test]
    fn policy_index_matches_free_function() {
        let robust = RobustConfig::new(0.1, 0.05).unwrap();
        let mut p = CrUcb::new(2, 0.05, robust).unwrap();
        let mut rng = crate::util::rng_from_seed(2);
        use rand::Rng;
        for t in 1..200 {
            let a = p.select(t, &Context::None, &mut rng);
            p.update(t, &Context::None, a, rng.random::<f64>() * 3.0).unwrap();
        }
        for a in 0..2 {
            assert_eq!(p.index[a], cr_ucb_index(&p.stats[a], 0.05, &robust).unwrap());
        }
    }

    #[test]
    fn uncontaminated_regret_examples() {
        let base = BanditInstance::gaussian(&[0.6, 0.4]).unwrap();
        let env = CorruptedEnvironment::new(base, 0.3, Corruption::constant(5.0)).unwrap();
        assert_eq!(uncontaminated_regret(&[0; 50], &env).unwrap(), 0.0);
        assert!((uncontaminated_regret(&[1; 100], &env).unwrap() - 20.0).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn shift_equivariant_and_order_free(
            mut xs in proptest::collection::vec(-10.0f64..10.0, 1..40),
            trim in 0.0f64..0.49,
            shift in -5.0f64..5.0,
        ) {
            let m = trimmed_mean(&xs, trim).unwrap();
            let shifted: Vec<f64> = xs.iter().map(|x| x + shift).collect();
            prop_assert!((trimmed_mean(&shifted, trim).unwrap() - (m + shift)).abs() < 1e-9);
            xs.reverse();
            prop_assert!((trimmed_mean(&xs, trim).unwrap() - m).abs() < 1e-9);
        }
    }
}
