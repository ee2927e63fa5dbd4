//! `tankest` — estimate a serially numbered population's size.
//!
//! Subcommands: `estimate` (point estimates from a sample file), `exact`
//! (exact sampling moments), `simulate` (seeded Monte Carlo grid), and
//! `report` (Markdown comparison report with optional SVG histograms).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use tankest_core::EstimatorId;

use commands::{cmd_estimate, cmd_exact, cmd_report, cmd_simulate};

#[derive(Parser)]
#[command(
    name = "tankest",
    version,
    about = "Estimators, exact moments, Monte Carlo comparison, and reports \
             for the serial-number population-size problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the estimator catalog to a sample file
    Estimate(EstimateArgs),
    /// Print exact sampling moments as CSV for one (N, k) setting
    Exact(ExactArgs),
    /// Run the Monte Carlo comparison grid and write results.csv
    Simulate(SimulateArgs),
    /// Render the Markdown comparison report, with optional histograms
    Report(ReportArgs),
}

#[derive(Args)]
pub struct EstimateArgs {
    /// Sample file: one serial label per line, `#` comments allowed
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated estimator ids (default: all)
    #[arg(long, value_delimiter = ',', value_parser = EstimatorId::from_str)]
    pub estimators: Option<Vec<EstimatorId>>,
}

#[derive(Args)]
pub struct ExactArgs {
    /// Population size
    #[arg(long = "N")]
    pub n: u64,
    /// Sample size
    #[arg(long)]
    pub k: u64,
    /// Comma-separated estimator ids (default: all)
    #[arg(long, value_delimiter = ',', value_parser = EstimatorId::from_str)]
    pub estimators: Option<Vec<EstimatorId>>,
    /// Compute by full enumeration and fail if the closed forms disagree
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// `key = value` config file (flags override file values)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated population sizes
    #[arg(long = "N", value_delimiter = ',')]
    pub n_values: Option<Vec<u64>>,
    /// Comma-separated sample sizes
    #[arg(long = "k", value_delimiter = ',')]
    pub k_values: Option<Vec<u64>>,
    /// Replications per cell (>= 2)
    #[arg(long)]
    pub reps: Option<u64>,
    /// Run seed; identical seeds give byte-identical results
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated estimator ids (default: all)
    #[arg(long, value_delimiter = ',', value_parser = EstimatorId::from_str)]
    pub estimators: Option<Vec<EstimatorId>>,
    /// Output directory for results.csv (and raw estimates)
    #[arg(long)]
    pub out: PathBuf,
    /// Also write per-replication estimates (for histograms)
    #[arg(long)]
    pub retain_raw: bool,
    /// Worker thread count (default: one per core)
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args)]
pub struct ReportArgs {
    /// results.csv produced by `simulate` (or hand-assembled)
    #[arg(long)]
    pub results: PathBuf,
    /// Where to write the Markdown report
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for histogram SVGs (needs raw estimates next to the
    /// results file)
    #[arg(long)]
    pub plots: Option<PathBuf>,
    /// Ranking criterion: mse, variance, or abs_bias
    #[arg(long, default_value = "mse")]
    pub criterion: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let help = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = e.print();
            // help/version are success; anything else is a usage error
            return if help { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let result = match &cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
