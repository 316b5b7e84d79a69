use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bandits::env::hard_instance_pair;
use bandits::harness::{
    run_experiment, summary_path, sweep, write_results, write_summary, Execution, ExperimentConfig, Summary,
};
use bandits::ope::{
    dr_estimate, is_estimate, read_log, read_table, reg_estimate, rejection_evaluate, wis_estimate, MissingCell,
    RewardModel, SampleAverageModel, TableModel, TablePolicy, TargetPolicy,
};
use bandits::BanditError;
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

#[derive(Parser, Debug)]
#[command(name = "bandits", version, about = "Bandit experiments and off-policy evaluation")]
struct Cli {
    /// Base seed; overrides `run.seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Run replications on one thread.
    #[arg(long, global = true)]
    serial: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment and write its regret CSV plus a JSON summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeat the experiment over several horizons and fit the regret exponent.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated horizons, e.g. `1e3,1e4,1e5`.
        #[arg(long, value_delimiter = ',', value_parser = parse_horizon)]
        horizons: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate a target policy's value from a logged dataset.
    Ope {
        #[arg(long)]
        log: PathBuf,
        /// Table of target probabilities, header `context,p0,p1,...`.
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, value_enum)]
        estimator: Estimator,
        /// Reward model table for `reg` and `dr`; fitted from the log when absent.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Print the two-instance construction behind the minimax lower bound.
    HardInstance {
        #[arg(long)]
        arms: usize,
        #[arg(long)]
        horizon: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Estimator {
    Reject,
    Is,
    Wis,
    Reg,
    Dr,
}

fn parse_horizon(s: &str) -> Result<usize, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(v >= 1.0) || v.fract() != 0.0 || v > 1e15 {
        return Err(format!("`{s}` is not a positive integer horizon"));
    }
    Ok(v as usize)
}

enum Failure {
    Config(BanditError),
    Runtime(BanditError),
}

impl Failure {
    /// Errors raised while reading user inputs are configuration errors.
    fn input(e: BanditError) -> Self {
        Failure::Config(e)
    }
}

impl From<BanditError> for Failure {
    fn from(e: BanditError) -> Self {
        if e.is_config() {
            Failure::Config(e)
        } else {
            Failure::Runtime(e)
        }
    }
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::from_path(path).map_err(Failure::input)?;
    if let Some(s) = seed {
        cfg.run.seed = s;
    }
    Ok(cfg)
}

fn print_summaries(summaries: &[Summary]) {
    for s in summaries {
        let exponent = s.fitted_exponent.map_or("n/a".to_string(), |e| format!("{e:.4}"));
        println!(
            "{}\tT={}\tn_rep={}\tfinal_regret={:.4} ± {:.4}\texponent={exponent}",
            s.policy, s.horizon, s.n_rep, s.final_regret_mean, s.final_regret_stderr
        );
    }
}

fn write_outputs(out: &Path, rows: &[bandits::harness::ResultRow], summaries: &[Summary]) -> Result<(), Failure> {
    write_results(rows, out).map_err(Failure::Runtime)?;
    let json = summary_path(out);
    write_summary(summaries, &json).map_err(Failure::Runtime)?;
    info!("wrote {} and {}", out.display(), json.display());
    Ok(())
}

fn ope(log: &Path, policy: &Path, estimator: Estimator, model: Option<&Path>) -> Result<f64, Failure> {
    let records = read_log(log).map_err(Failure::input)?;
    let target = TablePolicy::new(read_table(policy).map_err(Failure::input)?).map_err(Failure::input)?;
    let model = match (estimator, model) {
        (Estimator::Reg | Estimator::Dr, Some(path)) => {
            let m = TableModel::new(read_table(path).map_err(Failure::input)?).map_err(Failure::input)?;
            if m.num_contexts() != target.num_contexts() || m.num_arms() != target.num_arms() {
                return Err(Failure::Config(BanditError::Config(
                    "reward model and policy tables have different shapes".into(),
                )));
            }
            Some(Box::new(m) as Box<dyn RewardModel>)
        }
        (Estimator::Reg | Estimator::Dr, None) => Some(Box::new(SampleAverageModel::fit(
            &records,
            target.num_contexts(),
            target.num_arms(),
            MissingCell::Zero,
        )?) as Box<dyn RewardModel>),
        _ => None,
    };
    let value = match estimator {
        Estimator::Reject => {
            if target.as_deterministic().is_none() {
                return Err(Failure::Config(BanditError::Config(
                    "the rejection evaluator needs a deterministic policy table".into(),
                )));
            }
            let mut replay = target.clone();
            rejection_evaluate(&mut replay, &records)?
        }
        Estimator::Is => is_estimate(&target, &records)?,
        Estimator::Wis => wis_estimate(&target, &records)?,
        Estimator::Reg => reg_estimate(&target, &records, model.as_deref().expect("model built above"))?,
        Estimator::Dr => dr_estimate(&target, &records, model.as_deref().expect("model built above"))?,
    };
    Ok(value)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let exec = if cli.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config, cli.seed)?;
            let run = run_experiment(&cfg, exec)?;
            let summaries = run.summaries();
            write_outputs(&out, &run.rows(), &summaries)?;
            print_summaries(&summaries);
        }
        Command::Sweep { config, horizons, out } => {
            let cfg = load_config(&config, cli.seed)?;
            let result = sweep(&cfg, &horizons, exec)?;
            let summaries = result.summaries();
            write_outputs(&out, &result.rows(), &summaries)?;
            print_summaries(&summaries);
            for (i, p) in result.runs[0].policies.iter().enumerate() {
                match result.exponent(i) {
                    Ok(e) => println!("fitted_exponent\t{}\t{e:.4}", p.policy),
                    Err(err) => println!("fitted_exponent\t{}\tn/a ({err})", p.policy),
                }
            }
        }
        Command::Ope {
            log,
            policy,
            estimator,
            model,
        } => {
            let value = ope(&log, &policy, estimator, model.as_deref())?;
            println!("{value}");
        }
        Command::HardInstance { arms, horizon } => {
            let pair = hard_instance_pair(arms, horizon)?;
            println!("delta\t{}", pair.delta);
            println!("base\t{}", join(&pair.base.means()));
            for i in 1..arms {
                println!("alternative_{i}\t{}", join(&pair.alternative(i)?.means()));
            }
        }
    }
    Ok(())
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
