//! `pipstats`: estimate the probability of improved prediction from CSV
//! data, convert between PIP, p-values, MSE differences and overlap, and
//! run the simulation and replication studies.

mod commands;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use pipstats::sim::DEFAULT_MASTER_SEED;

#[derive(Parser)]
#[command(
    name = "pipstats",
    version,
    about = "Probability-of-improved-prediction toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Ols,
    Gbm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// Parametric plug-in Phi(|b1| / (4 s)); two-sample OLS only.
    C1,
    /// Empirical-CDF plug-in; two-sample OLS only.
    C2,
    /// Expected-PIP Monte Carlo; single-covariate OLS only.
    Expected,
    /// Split-sample estimate.
    Split,
    /// k-fold cross-validation estimate.
    Cv,
    /// Repeated k-fold cross-validation with quantile bounds.
    Repcv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TiePolicyArg {
    Strict,
    HalfCredit,
}

impl From<TiePolicyArg> for pipstats::TiePolicy {
    fn from(v: TiePolicyArg) -> Self {
        match v {
            TiePolicyArg::Strict => pipstats::TiePolicy::Strict,
            TiePolicyArg::HalfCredit => pipstats::TiePolicy::HalfCredit,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a PIP from a CSV dataset.
    Estimate {
        /// Input CSV with a header row.
        #[arg(long)]
        input: std::path::PathBuf,
        /// Name of the outcome column.
        #[arg(long)]
        outcome: String,
        /// Comma-separated covariates of the null model (empty for
        /// intercept-only).
        #[arg(long, default_value = "")]
        null_covariates: String,
        /// Comma-separated covariates of the full model.
        #[arg(long)]
        full_covariates: String,
        #[arg(long, value_enum, default_value = "ols")]
        model: ModelArg,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Fold count for cv/repcv.
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Repeat count for repcv.
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        /// Quantile level for repcv bounds.
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Training fraction for split.
        #[arg(long, default_value_t = 0.5)]
        split_ratio: f64,
        #[arg(long, value_enum, default_value = "strict")]
        tie_policy: TiePolicyArg,
        /// Monte-Carlo draws for the expected method.
        #[arg(long, default_value_t = pipstats::plugin::DEFAULT_N_MC)]
        n_mc: u64,
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
    },
    /// Convert between a PIP and a p-value, with the derived quantities.
    Relate {
        /// Sample size of the (balanced) two-sample comparison.
        #[arg(long)]
        n: usize,
        /// Two-sided p-value to convert.
        #[arg(long, conflicts_with = "pip")]
        p: Option<f64>,
        /// PIP to convert (in [0.5, 1)).
        #[arg(long)]
        pip: Option<f64>,
        /// Error SD; enables the MSE-difference output.
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Run a simulation study from a JSON configuration.
    Simulate {
        #[arg(long)]
        config: std::path::PathBuf,
        /// Output directory for the decision table and tidy CSV files.
        #[arg(long)]
        out: std::path::PathBuf,
        /// Worker threads (0 = all cores). Never affects results.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Replicate published two-group studies from summary statistics.
    Replicate {
        #[arg(long)]
        config: std::path::PathBuf,
        /// Worker threads (0 = all cores). Never affects results.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

fn exit_code(err: &pipstats::Error) -> i32 {
    match err {
        pipstats::Error::EstimationFailed { .. } => 3,
        _ => 2,
    }
}

fn with_pool<T>(
    threads: usize,
    body: impl FnOnce() -> pipstats::Result<T> + Send,
) -> pipstats::Result<T>
where
    T: Send,
{
    if threads == 0 {
        return body();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| pipstats::Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(body)
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate {
            input,
            outcome,
            null_covariates,
            full_covariates,
            model,
            method,
            k,
            repeats,
            alpha,
            split_ratio,
            tie_policy,
            n_mc,
            seed,
        } => commands::estimate(commands::EstimateArgs {
            input,
            outcome,
            null_covariates,
            full_covariates,
            model,
            method,
            k,
            repeats,
            alpha,
            split_ratio,
            tie_policy: tie_policy.into(),
            n_mc,
            seed,
        }),
        Command::Relate { n, p, pip, sigma } => commands::relate(n, p, pip, sigma),
        Command::Simulate {
            config,
            out,
            threads,
        } => with_pool(threads, || commands::simulate(&config, &out)),
        Command::Replicate { config, threads } => {
            with_pool(threads, || commands::replicate(&config))
        }
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        let mut source = std::error::Error::source(&err);
        while let Some(s) = source {
            eprintln!("  caused by: {s}");
            source = s.source();
        }
        std::process::exit(exit_code(&err));
    }
}
