use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use apboost::experiment::{
    bound_csv, compare, compare_csv, compare_table, gapplot_csv, lower_bound_study, metrics_csv,
    run_experiment, ExperimentConfig, LbMode, DEFAULT_LB_EXACT_CAP,
};
use apboost::lower_bounds::DEFAULT_NODE_BUDGET;
use apboost::model_io::{save_ensemble, write_atomic};
use apboost::{Dataset, Error, QuickBoostParams, Strategy, Variant};

#[derive(Parser)]
#[command(
    name = "apboost",
    version,
    about = "Boosted decision trees with adaptive-pruning split search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boost and write one CSV row per round.
    Train(TrainArgs),
    /// Run several strategies on the same data; the first is the candidate.
    Compare(CompareArgs),
    /// Depth-1 study of all strategies against both lower bounds.
    Lowerbound(LowerboundArgs),
    /// Turn a lowerbound CSV into gap fractions.
    Gapplot(GapplotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Ap,
    Qb,
    Classic,
}

#[derive(Clone, Copy, ValueEnum)]
enum LbArg {
    None,
    Wo,
    Exact,
}

#[derive(Args)]
struct Common {
    /// Training data in svmlight format (.gz accepted).
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    rounds: usize,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// none, lazy=Q or trim=Q.
    #[arg(long, default_value = "none", value_parser = parse_variant)]
    variant: Variant,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    qb_batches: usize,
    #[arg(long, default_value_t = 0.25)]
    qb_init_mass: f64,
    #[arg(long, value_enum, default_value = "none")]
    lb: LbArg,
    /// Largest training set for which --lb exact is allowed.
    #[arg(long, default_value_t = DEFAULT_LB_EXACT_CAP)]
    lb_exact_cap: usize,
    /// Branch-and-bound node budget per round for --lb exact.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    lb_node_budget: u64,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "ap")]
    strategy: StrategyArg,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the trained ensemble here.
    #[arg(long)]
    save_model: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Repeat for each run; the first is compared against the rest.
    #[arg(long, value_enum, required = true, num_args = 1..)]
    strategy: Vec<StrategyArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LowerboundArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 100)]
    rounds: usize,
    #[arg(long, default_value_t = 16)]
    qb_batches: usize,
    #[arg(long, default_value_t = 0.25)]
    qb_init_mass: f64,
    /// `exact` adds the exact bound; `wo` (default) reports only the weight-order bound.
    #[arg(long, value_enum, default_value = "wo")]
    lb: LbArg,
    #[arg(long, default_value_t = DEFAULT_LB_EXACT_CAP)]
    lb_exact_cap: usize,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    lb_node_budget: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GapplotArgs {
    /// CSV written by `lowerbound`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn qb_params(batches: usize, init_mass: f64) -> QuickBoostParams {
    QuickBoostParams { batches, init_mass }
}

fn strategy(s: StrategyArg, common: &Common) -> Strategy {
    match s {
        StrategyArg::Ap => Strategy::Adaptive,
        StrategyArg::Qb => Strategy::QuickBoost(qb_params(common.qb_batches, common.qb_init_mass)),
        StrategyArg::Classic => Strategy::Exhaustive,
    }
}

fn config(common: &Common, s: StrategyArg) -> ExperimentConfig {
    ExperimentConfig {
        data: common.data.clone(),
        test: common.test.clone(),
        rounds: common.rounds,
        depth: common.depth,
        strategy: strategy(s, common),
        variant: common.variant,
        seed: common.seed,
        lb: match common.lb {
            LbArg::None => LbMode::None,
            LbArg::Wo => LbMode::Wo,
            LbArg::Exact => LbMode::Exact,
        },
        lb_exact_cap: common.lb_exact_cap,
        node_budget: common.lb_node_budget,
    }
}

fn emit(out: Option<&Path>, text: &str) -> apboost::Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Ran to completion, but some exact bounds are only partial.
struct Timeouts(usize);

fn run(cli: Cli) -> apboost::Result<Option<Timeouts>> {
    match cli.command {
        Command::Train(a) => {
            let cfg = config(&a.common, a.strategy);
            let run = run_experiment(&cfg)?;
            for r in &run.timeouts {
                eprintln!(
                    "warning: round {r}: exact lower bound exceeded its node budget; written as -1"
                );
            }
            emit(a.out.as_deref(), &metrics_csv(&cfg, &run.metrics)?)?;
            if let Some(p) = &a.save_model {
                save_ensemble(&run.ensemble, p)?;
            }
            Ok((!run.timeouts.is_empty()).then_some(Timeouts(run.timeouts.len())))
        }
        Command::Compare(a) => {
            let cfgs: Vec<ExperimentConfig> =
                a.strategy.iter().map(|&s| config(&a.common, s)).collect();
            let rows = compare(&cfgs)?;
            print!("{}", compare_table(&rows));
            if let Some(p) = &a.out {
                write_atomic(p, compare_csv(&rows)?.as_bytes())?;
            }
            Ok(None)
        }
        Command::Lowerbound(a) => {
            let train = Dataset::load(&a.data, None)?;
            let exact = matches!(a.lb, LbArg::Exact);
            if exact && train.len() > a.lb_exact_cap {
                return Err(Error::Argument(format!(
                    "exact lower bound refused: {} examples exceed the cap of {}",
                    train.len(),
                    a.lb_exact_cap
                )));
            }
            let rows = lower_bound_study(
                &train,
                a.rounds,
                qb_params(a.qb_batches, a.qb_init_mass),
                exact,
                a.lb_node_budget,
            )?;
            let timeouts = rows
                .iter()
                .filter(|r| matches!(r.lb_exact, Some(Err(_))))
                .inspect(|r| {
                    eprintln!("warning: round {}: exact lower bound exceeded its node budget; written as -1", r.round)
                })
                .count();
            emit(a.out.as_deref(), &bound_csv(&rows)?)?;
            Ok((timeouts > 0).then_some(Timeouts(timeouts)))
        }
        Command::Gapplot(a) => {
            let input = std::fs::read_to_string(&a.input)?;
            emit(a.out.as_deref(), &gapplot_csv(&input)?)?;
            Ok(None)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Contract(_) => 2,
        Error::Io(_) | Error::Csv(_) | Error::Parse { .. } => 3,
        Error::BoundTimeout { .. } => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(Timeouts(n))) => {
            eprintln!("{n} round(s) with a partial exact lower bound");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
