//! TOML experiment documents: `[environment]`, `[policy]` (one table or an
//! array of tables) and `[run]`. Unknown keys are rejected.

use std::path::Path;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::regret::RegretKind;
use crate::adversarial::{exp3ix_default_gamma, Exp3, Exp3Ix, Exp4, ExpertSet, PerContext};
use crate::env::{
    hard_instance_pair, ActionSetGenerator, ArmDistribution, BanditInstance, ContextualInstance,
    CorruptedEnvironment, Corruption, Environment, LinearEnvironment, PiecewiseEnvironment, RewardTable,
};
use crate::error::{BanditError, Result};
use crate::linear::{ConfidenceSpec, LinUcb, OlrUcb, RadiusMode, RidgePredictor};
use crate::mab::{
    default_delta, etc_exploration_for_horizon, ExploreThenCommit, Greedy, Moss, SuccessiveElimination,
    ThompsonBeta, ThompsonGaussian, TsGaussianState, Ucb,
};
use crate::policy::Policy;
use crate::robust::{BudgetRule, ConservativeConfig, ConservativeUcb, CrUcb, Rexp3, RobustConfig, SlidingWindowUcb};
use crate::util::{replication_seed, rng_from_seed, sample_index};

fn config_err(msg: impl Into<String>) -> BanditError {
    BanditError::Config(msg.into())
}

fn unit_variance() -> f64 {
    1.0
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardFamily {
    Gaussian,
    Bernoulli,
}

fn instance(family: RewardFamily, means: &[f64], variance: f64) -> Result<BanditInstance> {
    match family {
        RewardFamily::Gaussian => BanditInstance::new(
            means.iter().map(|&m| ArmDistribution::gaussian(m, variance)).collect(),
        ),
        RewardFamily::Bernoulli => BanditInstance::bernoulli(means),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActionSpec {
    Fixed { actions: Vec<Vec<f64>> },
    Sphere {
        count: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    SharedContext {
        arms: usize,
        context_dim: usize,
        #[serde(default = "one")]
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvSpec {
    Gaussian {
        means: Vec<f64>,
        #[serde(default = "unit_variance")]
        variance: f64,
    },
    Bernoulli {
        means: Vec<f64>,
    },
    /// Rebuilt for every horizon: base means `(delta_T, 0, ..., 0)`, or the
    /// alternative with coordinate `alternative` raised to `2 delta_T`.
    HardPair {
        arms: usize,
        #[serde(default)]
        alternative: Option<usize>,
    },
    Table {
        rows: Vec<Vec<f64>>,
    },
    /// A Bernoulli reward table drawn once from `table_seed`.
    BernoulliTable {
        means: Vec<f64>,
        #[serde(default)]
        table_seed: Option<u64>,
    },
    /// Segment `i` starts at round `starts[i]` (the first at 1) with `means[i]`.
    Piecewise {
        family: RewardFamily,
        starts: Vec<usize>,
        means: Vec<Vec<f64>>,
        #[serde(default = "unit_variance")]
        variance: f64,
    },
    /// Gaussian arms whose rewards are replaced by `outlier` with probability `eta`.
    Corrupted {
        means: Vec<f64>,
        #[serde(default = "unit_variance")]
        variance: f64,
        eta: f64,
        outlier: f64,
    },
    /// I.i.d. contexts; `means[c]` are the arm means under context `c`.
    Contextual {
        family: RewardFamily,
        context_probs: Vec<f64>,
        means: Vec<Vec<f64>>,
        #[serde(default = "unit_variance")]
        variance: f64,
    },
    /// Uniform contexts and Bernoulli rewards drawn once from `table_seed`,
    /// then replayed identically in every replication.
    ObliviousContextual {
        means: Vec<Vec<f64>>,
        #[serde(default)]
        table_seed: Option<u64>,
    },
    Linear {
        theta: Vec<f64>,
        actions: ActionSpec,
        #[serde(default = "one")]
        noise: f64,
    },
}

/// What policies may need to know about the environment they will face.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvInfo {
    pub num_arms: usize,
    pub num_contexts: Option<usize>,
    pub dim: Option<usize>,
    pub theta_norm: Option<f64>,
    pub action_norm: Option<f64>,
    pub noise: Option<f64>,
    pub variation: Option<f64>,
    pub baseline_mean: Option<f64>,
    pub default_regret: RegretKind,
}

impl EnvInfo {
    fn plain(num_arms: usize, default_regret: RegretKind) -> Self {
        Self {
            num_arms,
            num_contexts: None,
            dim: None,
            theta_norm: None,
            action_norm: None,
            noise: None,
            variation: None,
            baseline_mean: None,
            default_regret,
        }
    }
}

pub struct BuiltEnv {
    pub env: Arc<dyn Environment>,
    pub info: EnvInfo,
}

impl std::fmt::Debug for BuiltEnv {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BuiltEnv")
            .field("family", &self.env.family())
            .field("info", &self.info)
            .finish()
    }
}

impl EnvSpec {
    /// Materializes the environment for `horizon` rounds. `seed` feeds the
    /// one-off draws of table environments that have no `table_seed`.
    pub fn build(&self, horizon: usize, seed: u64) -> Result<BuiltEnv> {
        let table_rng = |s: &Option<u64>| rng_from_seed(s.unwrap_or_else(|| replication_seed(seed, u64::MAX)));
        let built = match self {
            EnvSpec::Gaussian { means, variance } => {
                let inst = instance(RewardFamily::Gaussian, means, *variance)?;
                stationary(inst, RegretKind::Stochastic)
            }
            EnvSpec::Bernoulli { means } => {
                stationary(BanditInstance::bernoulli(means)?, RegretKind::Stochastic)
            }
            EnvSpec::HardPair { arms, alternative } => {
                let pair = hard_instance_pair(*arms, horizon)?;
                let inst = match alternative {
                    Some(i) => pair.alternative(*i)?,
                    None => pair.base,
                };
                stationary(inst, RegretKind::Stochastic)
            }
            EnvSpec::Table { rows } => {
                let table = RewardTable::new(rows.clone())?;
                let info = EnvInfo::plain(table.num_arms(), RegretKind::Adversarial);
                BuiltEnv {
                    env: Arc::new(table),
                    info,
                }
            }
            EnvSpec::BernoulliTable { means, table_seed } => {
                let table = RewardTable::bernoulli(means, horizon, &mut table_rng(table_seed))?;
                let info = EnvInfo::plain(table.num_arms(), RegretKind::Adversarial);
                BuiltEnv {
                    env: Arc::new(table),
                    info,
                }
            }
            EnvSpec::Piecewise {
                family,
                starts,
                means,
                variance,
            } => {
                if starts.len() != means.len() {
                    return Err(config_err("piecewise: starts and means differ in length"));
                }
                let segments = starts
                    .iter()
                    .zip(means)
                    .map(|(&s, m)| Ok((s, instance(*family, m, *variance)?)))
                    .collect::<Result<Vec<_>>>()?;
                let env = PiecewiseEnvironment::new(segments)?;
                let mut info = EnvInfo::plain(env.segments()[0].1.num_arms(), RegretKind::Dynamic);
                info.variation = Some(env.total_variation());
                BuiltEnv {
                    env: Arc::new(env),
                    info,
                }
            }
            EnvSpec::Corrupted {
                means,
                variance,
                eta,
                outlier,
            } => {
                let base = instance(RewardFamily::Gaussian, means, *variance)?;
                let mut info = EnvInfo::plain(base.num_arms(), RegretKind::Uncontaminated);
                info.baseline_mean = Some(means[0]);
                BuiltEnv {
                    env: Arc::new(CorruptedEnvironment::new(base, *eta, Corruption::constant(*outlier))?),
                    info,
                }
            }
            EnvSpec::Contextual {
                family,
                context_probs,
                means,
                variance,
            } => {
                let instances = means
                    .iter()
                    .map(|m| instance(*family, m, *variance))
                    .collect::<Result<Vec<_>>>()?;
                let env = ContextualInstance::random(context_probs.clone(), instances)?;
                let mut info = EnvInfo::plain(Environment::num_arms(&env), RegretKind::Dynamic);
                info.num_contexts = Some(env.num_contexts());
                BuiltEnv {
                    env: Arc::new(env),
                    info,
                }
            }
            EnvSpec::ObliviousContextual { means, table_seed } => {
                let c = means.len();
                if c == 0 {
                    return Err(config_err("oblivious_contextual needs at least one context"));
                }
                let k = means[0].len();
                if means.iter().any(|m| m.len() != k) {
                    return Err(config_err("oblivious_contextual: every context needs the same arm count"));
                }
                let mut rng = table_rng(table_seed);
                let uniform = vec![1.0 / c as f64; c];
                let contexts: Vec<usize> = (0..horizon).map(|_| sample_index(&uniform, &mut rng)).collect();
                let table = RewardTable::bernoulli_schedule(horizon, &mut rng, |t| means[contexts[t - 1]].clone())?;
                let env = ContextualInstance::oblivious(contexts, table, c)?;
                let mut info = EnvInfo::plain(k, RegretKind::Dynamic);
                info.num_contexts = Some(c);
                BuiltEnv {
                    env: Arc::new(env),
                    info,
                }
            }
            EnvSpec::Linear { theta, actions, noise } => {
                let generator = match actions {
                    ActionSpec::Fixed { actions } => {
                        ActionSetGenerator::Fixed(actions.iter().map(|a| DVector::from_vec(a.clone())).collect())
                    }
                    ActionSpec::Sphere { count, radius } => ActionSetGenerator::Sphere {
                        count: *count,
                        radius: *radius,
                    },
                    ActionSpec::SharedContext {
                        arms,
                        context_dim,
                        radius,
                    } => ActionSetGenerator::SharedContext {
                        arms: *arms,
                        context_dim: *context_dim,
                        radius: *radius,
                    },
                };
                let env = LinearEnvironment::new(DVector::from_vec(theta.clone()), generator, *noise)?;
                let mut info = EnvInfo::plain(Environment::num_arms(&env), RegretKind::Dynamic);
                info.dim = Some(env.dim());
                info.theta_norm = Some(env.theta_star().norm());
                info.action_norm = Some(env.action_norm_bound());
                info.noise = Some(env.noise_sigma());
                BuiltEnv {
                    env: Arc::new(env),
                    info,
                }
            }
        };
        Ok(built)
    }
}

fn stationary(inst: BanditInstance, kind: RegretKind) -> BuiltEnv {
    let mut info = EnvInfo::plain(inst.num_arms(), kind);
    info.baseline_mean = inst.means().first().copied();
    BuiltEnv {
        env: Arc::new(inst),
        info,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpertFamily {
    /// Every map from contexts to arms.
    AllMaps,
    /// One constant expert per arm.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExpertsSpec {
    Family(ExpertFamily),
    /// `tables[e][c]` is expert `e`'s arm in context `c`.
    Tables(Vec<Vec<usize>>),
}

impl Default for ExpertsSpec {
    fn default() -> Self {
        ExpertsSpec::Family(ExpertFamily::AllMaps)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetRuleSpec {
    Expected,
    #[default]
    Realized,
}

/// One policy. Parameters left out are derived from the horizon and the environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Etc {
        #[serde(default)]
        m: Option<usize>,
    },
    Ucb {
        #[serde(default)]
        delta: Option<f64>,
    },
    Moss {},
    Se {
        #[serde(default)]
        delta: Option<f64>,
    },
    Ts {
        #[serde(default)]
        prior_mean: f64,
        #[serde(default = "one")]
        prior_var: f64,
    },
    TsBeta {},
    Greedy {},
    Exp3 {
        #[serde(default)]
        eta: Option<f64>,
    },
    Exp3ix {
        #[serde(default)]
        eta: Option<f64>,
        #[serde(default)]
        gamma: Option<f64>,
    },
    Exp4 {
        #[serde(default)]
        eta: Option<f64>,
        #[serde(default)]
        experts: ExpertsSpec,
    },
    /// An independent copy of `inner` for every context.
    PerContext { inner: Box<PolicySpec> },
    Linucb {
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        theta_norm_bound: Option<f64>,
        #[serde(default)]
        radius_mode: RadiusMode,
    },
    OlrUcb {
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        noise: Option<f64>,
        #[serde(default)]
        theta_norm_bound: Option<f64>,
        #[serde(default = "one")]
        reward_bound: f64,
    },
    SwUcb {
        window: usize,
        #[serde(default)]
        delta: Option<f64>,
    },
    Rexp3 {
        #[serde(default)]
        variation_budget: Option<f64>,
        #[serde(default)]
        batch: Option<usize>,
    },
    ConservativeUcb {
        alpha: f64,
        #[serde(default)]
        baseline_mean: Option<f64>,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        rule: BudgetRuleSpec,
        #[serde(default)]
        reward_floor: f64,
        #[serde(default = "one")]
        reward_range: f64,
    },
    CrUcb {
        trim: f64,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        eta_bound: f64,
    },
}

impl PolicySpec {
    fn is_linear(&self) -> bool {
        matches!(self, PolicySpec::Linucb { .. } | PolicySpec::OlrUcb { .. })
    }

    /// Whether the policy relies on the baseline arm's counterfactual stream.
    pub fn is_conservative(&self) -> bool {
        matches!(self, PolicySpec::ConservativeUcb { .. })
    }

    /// Builds a fresh policy for `horizon` rounds against an environment described by `info`.
    pub fn build(&self, info: &EnvInfo, horizon: usize) -> Result<Box<dyn Policy>> {
        let linear_env = info.dim.is_some();
        if self.is_linear() != linear_env {
            return Err(config_err(if linear_env {
                "this policy cannot play a linear environment; use linucb or olr_ucb"
            } else {
                "linear policies need a linear environment"
            }));
        }
        let k = info.num_arms;
        let delta_or = |d: &Option<f64>| d.unwrap_or_else(|| default_delta(horizon));
        let policy: Box<dyn Policy> = match self {
            PolicySpec::Etc { m } => {
                let m = m.unwrap_or_else(|| etc_exploration_for_horizon(k, horizon));
                Box::new(ExploreThenCommit::new(k, m, horizon)?)
            }
            PolicySpec::Ucb { delta } => Box::new(Ucb::new(k, delta_or(delta))?),
            PolicySpec::Moss {} => Box::new(Moss::new(k, horizon)?),
            PolicySpec::Se { delta } => Box::new(SuccessiveElimination::new(k, delta_or(delta))?),
            PolicySpec::Ts { prior_mean, prior_var } => Box::new(ThompsonGaussian::new(TsGaussianState::new(
                k,
                *prior_mean,
                *prior_var,
            )?)),
            PolicySpec::TsBeta {} => Box::new(ThompsonBeta::new(k)?),
            PolicySpec::Greedy {} => Box::new(Greedy::new(k)?),
            PolicySpec::Exp3 { eta } => match eta {
                Some(eta) => Box::new(Exp3::new(k, *eta)?),
                None => Box::new(Exp3::for_horizon(k, horizon)?),
            },
            PolicySpec::Exp3ix { eta, gamma } => {
                let gamma = gamma.unwrap_or_else(|| exp3ix_default_gamma(k, horizon));
                Box::new(Exp3Ix::new(k, eta.unwrap_or(2.0 * gamma), gamma)?)
            }
            PolicySpec::Exp4 { eta, experts } => {
                let set = self::experts(experts, info)?;
                match eta {
                    Some(eta) => Box::new(Exp4::new(set, *eta)?),
                    None => Box::new(Exp4::for_horizon(set, horizon)?),
                }
            }
            PolicySpec::PerContext { inner } => {
                if matches!(**inner, PolicySpec::PerContext { .. }) {
                    return Err(config_err("per_context cannot nest another per_context"));
                }
                let mut inner_info = info.clone();
                inner_info.num_contexts = None;
                inner.build(&inner_info, horizon)?;
                let inner = (**inner).clone();
                Box::new(PerContext::new(move || {
                    inner
                        .build(&inner_info, horizon)
                        .expect("inner policy validated at construction")
                }))
            }
            PolicySpec::Linucb {
                lambda,
                delta,
                theta_norm_bound,
                radius_mode,
            } => {
                let spec = ConfidenceSpec::new(
                    delta_or(delta),
                    theta_norm_bound.or(info.theta_norm).unwrap_or(1.0),
                    info.action_norm.unwrap_or(1.0),
                )?;
                Box::new(LinUcb::new(info.dim.unwrap_or(0), *lambda, spec, *radius_mode)?)
            }
            PolicySpec::OlrUcb {
                lambda,
                delta,
                noise,
                theta_norm_bound,
                reward_bound,
            } => {
                let dim = info.dim.unwrap_or(0);
                let m2 = theta_norm_bound.or(info.theta_norm).unwrap_or(1.0).max(f64::MIN_POSITIVE);
                let noise = noise.or(info.noise).filter(|s| *s > 0.0).unwrap_or(1.0);
                let predictor =
                    RidgePredictor::new(dim, *lambda, m2, *reward_bound, info.action_norm.unwrap_or(1.0))?;
                Box::new(OlrUcb::new(predictor, dim, delta_or(delta), noise, *lambda, m2)?)
            }
            PolicySpec::SwUcb { window, delta } => Box::new(SlidingWindowUcb::new(k, *window, delta_or(delta))?),
            PolicySpec::Rexp3 {
                variation_budget,
                batch,
            } => match batch {
                Some(b) => Box::new(Rexp3::with_batch(k, horizon, *b)?),
                None => {
                    let budget = variation_budget
                        .or(info.variation)
                        .filter(|b| *b > 0.0)
                        .unwrap_or(1.0 / horizon as f64);
                    Box::new(Rexp3::new(k, horizon, budget)?)
                }
            },
            PolicySpec::ConservativeUcb {
                alpha,
                baseline_mean,
                delta,
                rule,
                reward_floor,
                reward_range,
            } => {
                let mut cfg = ConservativeConfig::new(*alpha, *baseline_mean, delta_or(delta))?.with_rule(match rule {
                    BudgetRuleSpec::Expected => BudgetRule::Expected,
                    BudgetRuleSpec::Realized => BudgetRule::Realized,
                });
                cfg.reward_floor = *reward_floor;
                cfg.reward_range = *reward_range;
                cfg.validate()?;
                Box::new(ConservativeUcb::new(k, cfg)?)
            }
            PolicySpec::CrUcb { trim, delta, eta_bound } => {
                Box::new(CrUcb::new(k, delta_or(delta), RobustConfig::new(*trim, *eta_bound)?)?)
            }
        };
        Ok(policy)
    }
}

fn experts(spec: &ExpertsSpec, info: &EnvInfo) -> Result<ExpertSet> {
    let contexts = info.num_contexts.unwrap_or(1);
    match spec {
        ExpertsSpec::Family(ExpertFamily::AllMaps) => ExpertSet::all_maps(contexts, info.num_arms),
        ExpertsSpec::Family(ExpertFamily::Constant) => ExpertSet::constant(info.num_arms, contexts),
        ExpertsSpec::Tables(tables) => {
            if tables.iter().any(|t| t.len() != contexts) {
                return Err(config_err(format!("every expert table needs {contexts} entries")));
            }
            ExpertSet::new(tables.clone(), info.num_arms)
        }
    }
}

fn default_record_every() -> usize {
    1
}

fn default_replications() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub horizon: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to the environment's natural notion of regret.
    #[serde(default)]
    pub regret: Option<RegretKind>,
    #[serde(default)]
    pub experiment_id: Option<String>,
    /// Emit a CSV row every this many rounds (the final round is always kept).
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Draw arm 0 from its own stream every round for all policies. Implied
    /// when any policy is conservative.
    #[serde(default)]
    pub baseline_stream: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyList {
    One(PolicySpec),
    Many(Vec<PolicySpec>),
}

impl PolicyList {
    pub fn as_slice(&self) -> &[PolicySpec] {
        match self {
            PolicyList::One(p) => std::slice::from_ref(p),
            PolicyList::Many(ps) => ps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvSpec,
    pub policy: PolicyList,
    pub run: RunSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| BanditError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            BanditError::Config(message) => BanditError::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })?;
        if cfg.run.experiment_id.is_none() {
            cfg.run.experiment_id = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.run.horizon == 0 {
            return Err(config_err("run.horizon must be positive"));
        }
        if self.run.replications == 0 {
            return Err(config_err("run.replications must be positive"));
        }
        if self.run.record_every == 0 {
            return Err(config_err("run.record_every must be positive"));
        }
        if self.policy.as_slice().is_empty() {
            return Err(config_err("at least one policy is required"));
        }
        Ok(())
    }

    pub fn experiment_id(&self) -> String {
        self.run.experiment_id.clone().unwrap_or_else(|| "experiment".into())
    }

    pub fn uses_baseline_stream(&self) -> bool {
        self.run.baseline_stream || self.policy.as_slice().iter().any(PolicySpec::is_conservative)
    }

    /// Builds the environment and checks every policy against it for `horizon`.
    pub fn check(&self, horizon: usize) -> Result<BuiltEnv> {
        let built = self.environment.build(horizon, self.run.seed).map_err(as_config)?;
        if let Some(max) = built.env.max_horizon() {
            if horizon > max {
                return Err(config_err(format!("horizon {horizon} exceeds the environment's {max} rounds")));
            }
        }
        for p in self.policy.as_slice() {
            p.build(&built.info, horizon).map_err(as_config)?;
        }
        Ok(built)
    }
}

/// Invalid arguments met while building from a config are configuration errors.
fn as_config(e: BanditError) -> BanditError {
    match e {
        BanditError::InvalidArgument(m) => BanditError::Config(m),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[environment]
kind = "gaussian"
means = [0.5, 0.2, 0.1]

[policy]
name = "ucb"

[run]
horizon = 100
replications = 3
seed = 9
"#;

    #[test]
    fn parses_minimal_document() {
        let cfg = ExperimentConfig::from_toml(BASIC).unwrap();
        assert_eq!(cfg.policy.as_slice(), &[PolicySpec::Ucb { delta: None }]);
        assert_eq!(cfg.run.record_every, 1);
        let built = cfg.check(100).unwrap();
        assert_eq!(built.info.num_arms, 3);
        assert_eq!(built.info.default_regret, RegretKind::Stochastic);
    }

    #[test]
    fn unknown_keys_are_errors() {
        for (from, to) in [
            ("seed = 9", "seed = 9\nspeed = 1"),
            ("name = \"ucb\"", "name = \"ucb\"\ndelt = 0.1"),
            ("kind = \"gaussian\"", "kind = \"gaussian\"\nscale = 2"),
            ("[run]", "[extra]\nx = 1\n[run]"),
        ] {
            let text = BASIC.replace(from, to);
            let err = ExperimentConfig::from_toml(&text).unwrap_err();
            assert!(err.is_config(), "{text}: {err}");
        }
    }

    #[test]
    fn unit_policy_rejects_parameters() {
        let text = BASIC.replace("name = \"ucb\"", "name = \"moss\"\ndelta = 0.1");
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let text = BASIC.replace("name = \"ucb\"", "name = \"moss\"");
        assert!(ExperimentConfig::from_toml(&text).is_ok());
    }

    #[test]
    fn policy_array() {
        let text = BASIC.replace(
            "[policy]\nname = \"ucb\"",
            "[[policy]]\nname = \"ucb\"\n[[policy]]\nname = \"etc\"\nm = 5",
        );
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg.policy.as_slice().len(), 2);
        assert_eq!(cfg.policy.as_slice()[1], PolicySpec::Etc { m: Some(5) });
    }

    #[test]
    fn linear_mismatch_is_config_error() {
        let text = BASIC.replace("name = \"ucb\"", "name = \"linucb\"");
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        assert!(cfg.check(100).unwrap_err().is_config());
    }

    #[test]
    fn etc_infeasible_m_is_config_error() {
        let text = BASIC.replace("name = \"ucb\"", "name = \"etc\"\nm = 50");
        let cfg = ExperimentConfig::from_toml(&text).unwrap();
        assert!(cfg.check(100).unwrap_err().is_config());
    }

    #[test]
    fn table_env_bounds_horizon() {
        let text = r#"
[environment]
kind = "table"
rows = [[1.0, 0.0], [0.0, 1.0]]
[policy]
name = "exp3"
[run]
horizon = 3
"#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert!(cfg.check(3).unwrap_err().is_config());
        assert!(cfg.check(2).is_ok());
    }

    #[test]
    fn every_policy_builds() {
        let mab = [
            "name = \"etc\"",
            "name = \"ucb\"\ndelta = 0.01",
            "name = \"moss\"",
            "name = \"se\"",
            "name = \"ts\"",
            "name = \"ts_beta\"",
            "name = \"greedy\"",
            "name = \"exp3\"",
            "name = \"exp3ix\"\ngamma = 0.01",
            "name = \"exp4\"\nexperts = \"constant\"",
            "name = \"per_context\"\ninner = { name = \"ucb\" }",
            "name = \"sw_ucb\"\nwindow = 50",
            "name = \"rexp3\"",
            "name = \"conservative_ucb\"\nalpha = 0.1\nbaseline_mean = 0.5",
            "name = \"cr_ucb\"\ntrim = 0.1",
        ];
        let env = EnvSpec::Bernoulli {
            means: vec![0.5, 0.4, 0.3],
        }
        .build(200, 0)
        .unwrap();
        for p in mab {
            let spec: PolicySpec = toml::from_str(p).unwrap_or_else(|e| panic!("{p}: {e}"));
            spec.build(&env.info, 200).unwrap_or_else(|e| panic!("{p}: {e}"));
        }
        let lin = EnvSpec::Linear {
            theta: vec![0.3, 0.1],
            actions: ActionSpec::Sphere { count: 4, radius: 1.0 },
            noise: 0.5,
        }
        .build(200, 0)
        .unwrap();
        for p in ["name = \"linucb\"", "name = \"olr_ucb\"", "name = \"linucb\"\nradius_mode = \"squared\""] {
            let spec: PolicySpec = toml::from_str(p).unwrap();
            spec.build(&lin.info, 200).unwrap_or_else(|e| panic!("{p}: {e}"));
        }
    }

    #[test]
    fn explicit_expert_tables() {
        let env = EnvSpec::Contextual {
            family: RewardFamily::Bernoulli,
            context_probs: vec![0.5, 0.5],
            means: vec![vec![0.1, 0.9], vec![0.9, 0.1]],
            variance: 1.0,
        }
        .build(50, 0)
        .unwrap();
        let spec: PolicySpec = toml::from_str("name = \"exp4\"\nexperts = [[0, 1], [1, 0]]").unwrap();
        assert!(spec.build(&env.info, 50).is_ok());
        let bad: PolicySpec = toml::from_str("name = \"exp4\"\nexperts = [[0], [1]]").unwrap();
        assert!(bad.build(&env.info, 50).is_err());
    }

    #[test]
    fn hard_pair_tracks_horizon() {
        let spec = EnvSpec::HardPair {
            arms: 2,
            alternative: None,
        };
        let a = spec.build(100, 0).unwrap();
        let b = spec.build(10_000, 0).unwrap();
        let gap = |e: &BuiltEnv| {
            let m = e.env.expected_rewards(1, &crate::policy::Context::None);
            m[0] - m[1]
        };
        assert!((gap(&a) - 0.05).abs() < 1e-12);
        assert!((gap(&b) - 0.005).abs() < 1e-12);
    }

    #[test]
    fn seeded_tables_are_reproducible() {
        let spec = EnvSpec::BernoulliTable {
            means: vec![0.5, 0.4],
            table_seed: Some(3),
        };
        let ctx = crate::policy::Context::None;
        let a = spec.build(20, 0).unwrap();
        let b = spec.build(20, 99).unwrap();
        for t in 1..=20 {
            assert_eq!(a.env.expected_rewards(t, &ctx), b.env.expected_rewards(t, &ctx));
        }
    }
}
