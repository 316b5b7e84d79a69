use std::f64::consts::PI;

use rand::RngCore;

use crate::episode::Trace;
use crate::error::{BanditError, Result};
use crate::mab::{check_arms, check_delta, lcb_index, ucb_index, ArmStats};
use crate::policy::{Context, Policy};
use crate::util::argmax;

/// How the agent lower-bounds its cumulative reward before leaving the baseline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BudgetRule {
    /// Compare expected rewards: played arms count at their LCB, the baseline
    /// at its mean. Keeps `sum mu_{A_s} >= (1 - alpha) t mu_0` with high
    /// probability.
    Expected,
    /// Compare realized rewards against the baseline's counterfactual stream:
    /// observed rewards count as they are, the candidate at the reward floor,
    /// and the unseen baseline rewards of non-baseline rounds at an anytime
    /// upper confidence bound.
    #[default]
    Realized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservativeConfig {
    /// Fraction of the baseline's reward the agent may give up, in (0, 1].
    pub alpha: f64,
    /// Known mean of the baseline arm 0.
    pub baseline_mean: Option<f64>,
    pub delta: f64,
    /// Smallest possible reward; the candidate's worst case.
    pub reward_floor: f64,
    /// Width of the reward range, giving subgaussian variance `range^2 / 4`.
    pub reward_range: f64,
    pub rule: BudgetRule,
}

impl ConservativeConfig {
    pub fn new(alpha: f64, baseline_mean: Option<f64>, delta: f64) -> Result<Self> {
        let cfg = Self {
            alpha,
            baseline_mean,
            delta,
            reward_floor: 0.0,
            reward_range: 1.0,
            rule: BudgetRule::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rule(mut self, rule: BudgetRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(BanditError::invalid(format!("alpha = {} must lie in (0, 1]", self.alpha)));
        }
        check_delta(self.delta)?;
        if !(self.reward_range > 0.0) || !self.reward_floor.is_finite() {
            return Err(BanditError::invalid("reward range must be positive and floor finite"));
        }
        if let Some(m) = self.baseline_mean {
            if !m.is_finite() {
                return Err(BanditError::invalid("baseline mean must be finite"));
            }
        }
        Ok(())
    }
}

/// Running reward totals split by whether the baseline was played.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BudgetLedger {
    pub baseline_sum: f64,
    pub baseline_rounds: usize,
    pub explore_sum: f64,
    pub explore_rounds: usize,
}

impl BudgetLedger {
    pub fn record(&mut self, arm: usize, reward: f64) {
        if arm == 0 {
            self.baseline_sum += reward;
            self.baseline_rounds += 1;
        } else {
            self.explore_sum += reward;
            self.explore_rounds += 1;
        }
    }
}

fn baseline_bounds(stats: &[ArmStats], cfg: &ConservativeConfig) -> (f64, f64) {
    match cfg.baseline_mean {
        Some(m) => (m, m),
        None => (
            lcb_index(&stats[0], cfg.delta).expect("delta validated"),
            ucb_index(&stats[0], cfg.delta).expect("delta validated"),
        ),
    }
}

/// Lower estimate of the constraint margin if `candidate` is played next;
/// the candidate is allowed when this is non-negative.
pub fn conservative_slack(
    stats: &[ArmStats],
    cfg: &ConservativeConfig,
    ledger: &BudgetLedger,
    candidate: usize,
) -> f64 {
    let (mu0_lo, mu0_hi) = baseline_bounds(stats, cfg);
    let keep = 1.0 - cfg.alpha;
    match cfg.rule {
        BudgetRule::Expected => {
            let worst = |a: usize| {
                lcb_index(&stats[a], cfg.delta)
                    .expect("delta validated")
                    .max(cfg.reward_floor)
            };
            let mut lower = 0.0;
            for (a, s) in stats.iter().enumerate() {
                if s.count() == 0 {
                    continue;
                }
                let per_pull = if a == 0 { mu0_lo } else { worst(a) };
                lower += s.count() as f64 * per_pull;
            }
            lower += if candidate == 0 { mu0_lo } else { worst(candidate) };
            let rounds: usize = stats.iter().map(ArmStats::count).sum::<usize>() + 1;
            lower - keep * rounds as f64 * mu0_hi
        }
        BudgetRule::Realized => {
            let n = (ledger.explore_rounds + 1) as f64;
            let var = cfg.reward_range * cfg.reward_range / 4.0;
            let dev = (2.0 * var * n * (PI * PI * n * n / (6.0 * cfg.delta)).ln()).sqrt();
            let unseen_baseline = n * mu0_hi + dev;
            cfg.alpha * ledger.baseline_sum + ledger.explore_sum + cfg.reward_floor
                - keep * unseen_baseline
        }
    }
}

/// UCB's suggestion if the budget allows it, otherwise the baseline arm 0.
pub fn conservative_select(stats: &[ArmStats], cfg: &ConservativeConfig, ledger: &BudgetLedger) -> usize {
    let idx: Vec<f64> = stats
        .iter()
        .map(|s| ucb_index(s, cfg.delta).expect("delta validated"))
        .collect();
    let candidate = argmax(&idx);
    if candidate == 0 || cfg.alpha >= 1.0 {
        return candidate;
    }
    if conservative_slack(stats, cfg, ledger, candidate) >= 0.0 {
        candidate
    } else {
        0
    }
}

#[derive(Debug, Clone)]
pub struct ConservativeUcb {
    cfg: ConservativeConfig,
    stats: Vec<ArmStats>,
    ledger: BudgetLedger,
}

impl ConservativeUcb {
    pub fn new(k: usize, cfg: ConservativeConfig) -> Result<Self> {
        check_arms(k)?;
        cfg.validate()?;
        Ok(Self {
            cfg,
            stats: vec![ArmStats::new(); k],
            ledger: BudgetLedger::default(),
        })
    }

    pub fn ledger(&self) -> &BudgetLedger {
        &self.ledger
    }
}

impl Policy for ConservativeUcb {
    fn name(&self) -> String {
        "conservative_ucb".into()
    }

    fn select(&mut self, _t: usize, _ctx: &Context, _rng: &mut dyn RngCore) -> usize {
        conservative_select(&self.stats, &self.cfg, &self.ledger)
    }

    fn update(&mut self, _t: usize, _ctx: &Context, arm: usize, reward: f64) -> Result<()> {
        self.stats[arm].record(reward);
        self.ledger.record(arm, reward);
        Ok(())
    }

    fn reset(&mut self) {
        self.stats.iter_mut().for_each(ArmStats::clear);
        self.ledger = BudgetLedger::default();
    }
}

/// First round where `sum R_{s,A_s} < (1 - alpha) sum R_{s,0}`, using the
/// trace's recorded baseline stream.
pub fn first_violation(trace: &Trace, alpha: f64) -> Result<Option<usize>> {
    let mut played = 0.0;
    let mut baseline = 0.0;
    for s in &trace.steps {
        let b = s.baseline_reward.ok_or_else(|| {
            BanditError::invalid("trace has no baseline stream; run it with a baseline generator")
        })?;
        played += s.reward;
        baseline += b;
        if played < (1.0 - alpha) * baseline - 1e-9 {
            return Ok(Some(s.t));
        }
    }
    Ok(None)
}
