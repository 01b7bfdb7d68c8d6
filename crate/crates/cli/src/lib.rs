//! `riskforest` command-line front end.
//!
//! Exit codes: 0 success, 1 validation or tolerance failure, 2 usage error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod io;

pub use config::{expand_config, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "riskforest", version, about = "Cost-sensitive random forests for risk labels, with audit tooling")]
#[command(args_override_self = true)]
pub struct Cli {
    /// TOML file of flag defaults for the command (keys are long flag names).
    #[arg(long, global = true, env = "RISKFOREST_CONFIG")]
    pub config: Option<PathBuf>,

    /// Worker threads for training and search. Never changes any output.
    #[arg(long, global = true, env = "RISKFOREST_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recompute the published performance figures from the bundled confusion matrices.
    ReproduceTables(ReproduceArgs),
    /// Write a seeded synthetic dataset.
    Generate(GenerateArgs),
    /// Train a forest and write it with its out-of-bag report.
    Train(TrainArgs),
    /// Write per-row forecasts and vote tallies.
    Predict(ModelDataArgs),
    /// Confusion matrix and performance measures of a model on labeled data.
    Evaluate(ModelDataArgs),
    /// Group fairness criteria and the threshold impossibility search.
    Audit(AuditArgs),
    /// Random-guesser and majority-label accuracy for a set of marginals.
    Baseline(BaselineArgs),
    /// k-anonymity of a table over chosen quasi-identifier columns.
    KAnon(KAnonArgs),
    /// Choose the high-risk class weight giving a target cautious:dangerous error ratio.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Directory for the command's output files (created if needed).
    #[arg(long, env = "RISKFOREST_OUT")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SchemaArgs {
    /// Schema TOML. Defaults to the bundled custody-event schema.
    #[arg(long, env = "RISKFOREST_SCHEMA")]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    #[arg(long, env = "RISKFOREST_TREES", default_value_t = riskforest_core::forest::DEFAULT_TREES)]
    pub trees: usize,
    /// Class weights in label order, comma separated. Defaults to all 1.
    #[arg(long, env = "RISKFOREST_WEIGHTS")]
    pub weights: Option<String>,
    #[arg(long, env = "RISKFOREST_MIN_LEAF")]
    pub min_leaf: Option<usize>,
    #[arg(long, env = "RISKFOREST_MAX_DEPTH")]
    pub max_depth: Option<usize>,
    /// Features tried per node. Defaults to the rounded-up square root of the feature count.
    #[arg(long, env = "RISKFOREST_MAX_FEATURES")]
    pub max_features: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Directory holding `published_oob.csv` and `published_validation.csv`.
    /// Defaults to the copies bundled in the binary.
    #[arg(long, env = "RISKFOREST_FIXTURES")]
    pub fixtures: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[arg(long, env = "RISKFOREST_ROWS", default_value_t = 10_000)]
    pub rows: usize,
    /// Label probabilities in label order. Defaults to the published outcome shares.
    #[arg(long, env = "RISKFOREST_MARGINALS")]
    pub marginals: Option<String>,
    #[arg(long, env = "RISKFOREST_SIGNAL", default_value_t = 0.8)]
    pub signal: f64,
    #[arg(long, env = "RISKFOREST_SEED")]
    pub seed: u64,
    /// Split rows into two equal groups `A` and `B` whose first-label share
    /// differs by this much.
    #[arg(long, env = "RISKFOREST_PLANTED_GAP")]
    pub planted_gap: Option<f64>,
    /// Also write a seeded `train.csv` / `holdout.csv` split with this holdout share.
    #[arg(long, env = "RISKFOREST_HOLDOUT")]
    pub holdout: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[arg(long, env = "RISKFOREST_DATA")]
    pub data: PathBuf,
    #[arg(long, env = "RISKFOREST_SEED")]
    pub seed: u64,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ModelDataArgs {
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[arg(long, env = "RISKFOREST_MODEL")]
    pub model: PathBuf,
    #[arg(long, env = "RISKFOREST_DATA")]
    pub data: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub schema: SchemaArgs,
    /// Model whose forecasts are audited. Required unless `--recipe` is given.
    #[arg(long, env = "RISKFOREST_MODEL", required_unless_present = "recipe")]
    pub model: Option<PathBuf>,
    /// Data with a group column. Required unless `--recipe` is given.
    #[arg(long, env = "RISKFOREST_DATA", required_unless_present = "recipe")]
    pub data: Option<PathBuf>,
    #[arg(long, env = "RISKFOREST_GROUP_COLUMN", default_value = "group")]
    pub group_column: String,
    /// Label treated as positive. Defaults to the first (highest-risk) label.
    #[arg(long, env = "RISKFOREST_POSITIVE")]
    pub positive: Option<String>,
    #[arg(long, env = "RISKFOREST_EPSILON", default_value_t = riskforest_core::fairness::DEFAULT_EPSILON)]
    pub epsilon: f64,
    /// Audit the built-in two-group scored instance (base rates 0.3 and 0.6) instead of a model.
    #[arg(long, conflicts_with_all = ["model", "data"], requires = "seed")]
    pub recipe: bool,
    #[arg(long, env = "RISKFOREST_SEED")]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub schema: SchemaArgs,
    /// Label probabilities, comma separated.
    #[arg(long, env = "RISKFOREST_MARGINALS", conflicts_with = "data")]
    pub marginals: Option<String>,
    /// Take the marginals from this dataset's label frequencies.
    #[arg(long, env = "RISKFOREST_DATA")]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct KAnonArgs {
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[arg(long, env = "RISKFOREST_DATA")]
    pub data: PathBuf,
    /// Quasi-identifier columns, comma separated.
    #[arg(long, env = "RISKFOREST_COLUMNS")]
    pub columns: String,
    #[arg(long, env = "RISKFOREST_GROUP_COLUMN", default_value = "group")]
    pub group_column: String,
    /// Exit with status 1 when k falls below this.
    #[arg(long, env = "RISKFOREST_MIN_K")]
    pub min_k: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[arg(long, env = "RISKFOREST_DATA")]
    pub data: PathBuf,
    #[arg(long, env = "RISKFOREST_SEED")]
    pub seed: u64,
    #[arg(long, env = "RISKFOREST_TARGET", default_value_t = 2.0)]
    pub target: f64,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

/// Parse `args` (program name first), run the command and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_FAILURE
        }
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.threads {
        Some(0) => anyhow::bail!("--threads must be at least 1"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| commands::dispatch(cli.command))
        }
        None => commands::dispatch(cli.command),
    }
}
