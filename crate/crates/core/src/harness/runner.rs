//! Monte Carlo fan-out over replications. Each replication owns its policy
//! and generator; results are merged in replication order, so serial and
//! parallel runs produce identical output.

use rayon::prelude::*;

use super::config::{BuiltEnv, ExperimentConfig};
use super::fit::scaling_exponent_fit;
use super::output::{ResultRow, Summary};
use super::regret::{mean_stderr, regret_from_trace, RegretKind};
use crate::episode::{run_episode_with, run_episode_with_baseline};
use crate::error::{BanditError, Result};
use crate::util::{replication_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

/// Cumulative regret of one replication at the recorded rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RepCurve {
    pub rep: usize,
    /// `(t, instant_regret, cum_regret)`.
    pub points: Vec<(usize, f64, f64)>,
    /// Cumulative regret at every round of the fit grid.
    pub grid: Vec<f64>,
}

impl RepCurve {
    pub fn final_regret(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRun {
    pub policy: String,
    pub reps: Vec<RepCurve>,
}

impl PolicyRun {
    pub fn finals(&self) -> Vec<f64> {
        self.reps.iter().map(RepCurve::final_regret).collect()
    }

    pub fn final_mean_stderr(&self) -> (f64, f64) {
        mean_stderr(self.finals())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub experiment_id: String,
    pub horizon: usize,
    pub kind: RegretKind,
    /// Rounds at which `RepCurve::grid` is sampled.
    pub grid: Vec<usize>,
    pub policies: Vec<PolicyRun>,
}

/// About ten log-spaced rounds between `horizon / 100` and `horizon`.
pub fn fit_grid(horizon: usize) -> Vec<usize> {
    let lo = (horizon as f64 / 100.0).max(1.0);
    let hi = horizon as f64;
    let mut out: Vec<usize> = (0..10)
        .map(|i| (lo * (hi / lo).powf(i as f64 / 9.0)).round() as usize)
        .map(|t| t.clamp(1, horizon))
        .collect();
    out.dedup();
    out
}

/// Policy labels, with `#2`, `#3`, ... appended to repeated names.
fn labels(names: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        let seen = names[..i].iter().filter(|m| *m == n).count();
        out.push(if seen == 0 { n.clone() } else { format!("{n}#{}", seen + 1) });
    }
    out
}

fn run_rep(
    cfg: &ExperimentConfig,
    built: &BuiltEnv,
    policy_index: usize,
    horizon: usize,
    kind: RegretKind,
    grid: &[usize],
    rep: usize,
) -> Result<RepCurve> {
    let spec = &cfg.policy.as_slice()[policy_index];
    let mut policy = spec.build(&built.info, horizon)?;
    let rep_seed = replication_seed(cfg.run.seed, rep as u64);
    let mut rng = rng_from_seed(rep_seed);
    let trace = if cfg.uses_baseline_stream() {
        let mut baseline_rng = rng_from_seed(replication_seed(rep_seed, 1));
        run_episode_with_baseline(built.env.as_ref(), &mut policy, horizon, &mut rng, &mut baseline_rng)?
    } else {
        run_episode_with(built.env.as_ref(), &mut policy, horizon, &mut rng)?
    };
    let cum = regret_from_trace(&trace, kind)?;
    let every = cfg.run.record_every;
    let points = (1..=horizon)
        .filter(|t| t % every == 0 || *t == horizon)
        .map(|t| {
            let prev = if t >= 2 { cum[t - 2] } else { 0.0 };
            (t, cum[t - 1] - prev, cum[t - 1])
        })
        .collect();
    Ok(RepCurve {
        rep,
        points,
        grid: grid.iter().map(|&t| cum[t - 1]).collect(),
    })
}

/// Runs every policy of `cfg` at `horizon` rounds for `cfg.run.replications` reps.
pub fn run_at_horizon(cfg: &ExperimentConfig, horizon: usize, exec: Execution) -> Result<ExperimentRun> {
    cfg.validate()?;
    let built = cfg.check(horizon)?;
    let kind = cfg.run.regret.unwrap_or(built.info.default_regret);
    let grid = fit_grid(horizon);
    let n_rep = cfg.run.replications;
    let mut names = Vec::new();
    let mut policies = Vec::new();
    for i in 0..cfg.policy.as_slice().len() {
        names.push(cfg.policy.as_slice()[i].build(&built.info, horizon)?.name());
        let one = |rep| run_rep(cfg, &built, i, horizon, kind, &grid, rep);
        let reps = match exec {
            Execution::Parallel => (0..n_rep).into_par_iter().map(one).collect::<Result<Vec<_>>>()?,
            Execution::Serial => (0..n_rep).map(one).collect::<Result<Vec<_>>>()?,
        };
        policies.push(reps);
    }
    let policies = labels(names)
        .into_iter()
        .zip(policies)
        .map(|(policy, reps)| PolicyRun { policy, reps })
        .collect();
    Ok(ExperimentRun {
        experiment_id: cfg.experiment_id(),
        horizon,
        kind,
        grid,
        policies,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, exec: Execution) -> Result<ExperimentRun> {
    run_at_horizon(cfg, cfg.run.horizon, exec)
}

impl ExperimentRun {
    /// CSV rows ordered by (policy, rep, t).
    pub fn rows(&self) -> Vec<ResultRow> {
        let mut out = Vec::new();
        for p in &self.policies {
            for r in &p.reps {
                for &(t, instant, cum) in &r.points {
                    out.push(ResultRow {
                        experiment_id: self.experiment_id.clone(),
                        policy: p.policy.clone(),
                        rep: r.rep,
                        t,
                        instant_regret: instant,
                        cum_regret: cum,
                    });
                }
            }
        }
        out
    }

    /// Slope of the mean cumulative regret against `t` on the fit grid.
    pub fn within_run_exponent(&self, policy: &PolicyRun) -> Option<f64> {
        let n = policy.reps.len() as f64;
        let points: Vec<(f64, f64)> = self
            .grid
            .iter()
            .enumerate()
            .map(|(j, &t)| (t as f64, policy.reps.iter().map(|r| r.grid[j]).sum::<f64>() / n))
            .collect();
        scaling_exponent_fit(&points).ok()
    }

    /// One summary per policy; the exponent is fitted within the run.
    pub fn summaries(&self) -> Vec<Summary> {
        self.policies
            .iter()
            .map(|p| {
                let (mean, stderr) = p.final_mean_stderr();
                Summary {
                    policy: p.policy.clone(),
                    horizon: self.horizon,
                    n_rep: p.reps.len(),
                    final_regret_mean: mean,
                    final_regret_stderr: stderr,
                    fitted_exponent: self.within_run_exponent(p),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRun {
    pub runs: Vec<ExperimentRun>,
}

/// Runs the experiment once per horizon. Each run's experiment id gets a
/// `_T<horizon>` suffix so the rows stay distinguishable.
pub fn sweep(cfg: &ExperimentConfig, horizons: &[usize], exec: Execution) -> Result<SweepRun> {
    if horizons.is_empty() {
        return Err(BanditError::Config("sweep needs at least one horizon".into()));
    }
    let runs = horizons
        .iter()
        .map(|&h| {
            let mut run = run_at_horizon(cfg, h, exec)?;
            run.experiment_id = format!("{}_T{h}", run.experiment_id);
            Ok(run)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepRun { runs })
}

impl SweepRun {
    pub fn rows(&self) -> Vec<ResultRow> {
        self.runs.iter().flat_map(ExperimentRun::rows).collect()
    }

    /// Log-log slope of mean final regret against the horizon for policy `index`.
    pub fn exponent(&self, index: usize) -> Result<f64> {
        let points: Vec<(f64, f64)> = self
            .runs
            .iter()
            .map(|r| (r.horizon as f64, r.policies[index].final_mean_stderr().0))
            .collect();
        scaling_exponent_fit(&points)
    }

    /// One summary per (policy, horizon), each carrying the cross-horizon exponent.
    pub fn summaries(&self) -> Vec<Summary> {
        let Some(first) = self.runs.first() else {
            return Vec::new();
        };
        let exponents: Vec<Option<f64>> = (0..first.policies.len()).map(|i| self.exponent(i).ok()).collect();
        let mut out = Vec::new();
        for (i, exponent) in exponents.iter().enumerate() {
            for run in &self.runs {
                let p = &run.policies[i];
                let (mean, stderr) = p.final_mean_stderr();
                out.push(Summary {
                    policy: p.policy.clone(),
                    horizon: run.horizon,
                    n_rep: p.reps.len(),
                    final_regret_mean: mean,
                    final_regret_stderr: stderr,
                    fitted_exponent: *exponent,
                });
            }
        }
        out
    }
}
