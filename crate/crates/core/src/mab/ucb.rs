use rand::RngCore;

use super::{check_arms, check_delta, confidence_width, ArmStats};
use crate::error::Result;
use crate::policy::{Context, Policy};
use crate::util::argmax;

/// Upper confidence bound: `+inf` for an unplayed arm, otherwise
/// `mean + sqrt(2 ln(1/delta) / count)`.
pub fn ucb_index(stats: &ArmStats, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(match stats.mean() {
        None => f64::INFINITY,
        Some(mean) => mean + confidence_width(stats.count(), delta),
    })
}

/// Lower confidence bound, `-inf` for an unplayed arm.
pub fn lcb_index(stats: &ArmStats, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(match stats.mean() {
        None => f64::NEG_INFINITY,
        Some(mean) => mean - confidence_width(stats.count(), delta),
    })
}

/// MOSS index: `mean + sqrt(max(ln(T / (K n)), 0) / n)`, `+inf` when unplayed.
pub fn moss_index(stats: &ArmStats, horizon: usize, k: usize) -> f64 {
    match stats.mean() {
        None => f64::INFINITY,
        Some(mean) => {
            let n = stats.count() as f64;
            let log_term = (horizon as f64 / (k as f64 * n)).ln().max(0.0);
            mean + (log_term / n).sqrt()
        }
    }
}

/// UCB with a fixed confidence level.
#[derive(Debug, Clone)]
pub struct Ucb {
    delta: f64,
    stats: Vec<ArmStats>,
}

impl Ucb {
    pub fn new(k: usize, delta: f64) -> Result<Self> {
        check_arms(k)?;
        check_delta(delta)?;
        Ok(Self {
            delta,
            stats: vec![ArmStats::new(); k],
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn stats(&self) -> &[ArmStats] {
        &self.stats
    }

    pub fn indices(&self) -> Vec<f64> {
        self.stats
            .iter()
            .map(|s| ucb_index(s, self.delta).expect("delta validated at construction"))
            .collect()
    }
}

impl Policy for Ucb {
    fn name(&self) -> String {
        "ucb".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        argmax(&self.indices())
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        self.stats[arm].record(reward);
        Ok(())
    }

    fn reset(&mut self) {
        self.stats.iter_mut().for_each(ArmStats::clear);
    }
}

/// MOSS: UCB with the horizon-aware bonus.
#[derive(Debug, Clone)]
pub struct Moss {
    horizon: usize,
    stats: Vec<ArmStats>,
}

impl Moss {
    pub fn new(k: usize, horizon: usize) -> Result<Self> {
        check_arms(k)?;
        Ok(Self {
            horizon,
            stats: vec![ArmStats::new(); k],
        })
    }
}

impl Policy for Moss {
    fn name(&self) -> String {
        "moss".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        let k = self.stats.len();
        let idx: Vec<f64> = self
            .stats
            .iter()
            .map(|s| moss_index(s, self.horizon, k))
            .collect();
        argmax(&idx)
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        self.stats[arm].record(reward);
        Ok(())
    }

    fn reset(&mut self) {
        self.stats.iter_mut().for_each(ArmStats::clear);
    }
}

/// Pure exploitation after one pull per arm.
#[derive(Debug, Clone)]
pub struct Greedy {
    stats: Vec<ArmStats>,
}

impl Greedy {
    pub fn new(k: usize) -> Result<Self> {
        check_arms(k)?;
        Ok(Self {
            stats: vec![ArmStats::new(); k],
        })
    }
}

impl Policy for Greedy {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        let idx: Vec<f64> = self
            .stats
            .iter()
            .map(|s| s.mean().unwrap_or(f64::INFINITY))
            .collect();
        argmax(&idx)
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        self.stats[arm].record(reward);
        Ok(())
    }

    fn reset(&mut self) {
        self.stats.iter_mut().for_each(ArmStats::clear);
    }
}
