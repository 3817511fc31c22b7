//! fracmc: reproducible experiment pipelines over the fractional Monte
//! Carlo library. Every command resolves its settings as flags over
//! config-file values over defaults, writes all artifacts into one output
//! directory, and finishes with a manifest of checksums.
//!
//! Exit codes: 0 success, 1 validation, 2 data/ingestion, 3 numerical.

// Negated float comparisons like `!(x > 0.0)` are deliberate NaN guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod manifest;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracmc::Error;

use crate::config::Config;

#[derive(Parser)]
#[command(name = "fracmc", version, about = "Fractional process simulation, Hurst estimation, and target-volatility option pricing")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Config file in plain `key = value` form; flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory (default: $FRACMC_OUT_DIR, then ./out)
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,

    /// Worker threads (default: machine parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an fBM ensemble and report moment and RMSE diagnostics
    GenFbm(commands::gen_fbm::GenFbmArgs),
    /// Estimate the Hurst exponent from a series or a simulated RFSV path
    EstimateHurst(commands::estimate_hurst::EstimateHurstArgs),
    /// Price target-volatility options under fSABR by Monte Carlo
    PriceTvo(commands::price_tvo::PriceTvoArgs),
    /// Run the built-in randomness battery and export raw words
    RandCheck(commands::rand_check::RandCheckArgs),
    /// Rolling realized volatility from a price CSV
    RealizedVar(commands::realized_var::RealizedVarArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cli: Cli) -> fracmc::Result<ExitCode> {
    let cfg = Config::load(cli.config.as_deref())?;

    let out_dir = match cfg.resolve_opt(cli.out_dir, "out-dir")? {
        Some(dir) => dir,
        None => std::env::var_os("FRACMC_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out")),
    };
    std::fs::create_dir_all(&out_dir)?;

    if let Some(threads) = cfg.resolve_opt(cli.threads, "threads")? {
        // Ignore the error if a pool already exists (e.g. repeated calls
        // in one process during tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }

    match cli.command {
        Command::GenFbm(args) => commands::gen_fbm::run(&args, &cfg, &out_dir)?,
        Command::EstimateHurst(args) => commands::estimate_hurst::run(&args, &cfg, &out_dir)?,
        Command::PriceTvo(args) => commands::price_tvo::run(&args, &cfg, &out_dir)?,
        Command::RandCheck(args) => {
            let all_pass = commands::rand_check::run(&args, &cfg, &out_dir)?;
            if !all_pass {
                eprintln!("randomness battery FAILED; see report.json");
                return Ok(ExitCode::from(3));
            }
        }
        Command::RealizedVar(args) => commands::realized_var::run(&args, &cfg, &out_dir)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidParam(_) | Error::GridMismatch(_) => 1,
        Error::Io(_)
        | Error::FileTooShort { .. }
        | Error::TruncatedWord { .. }
        | Error::Exhausted { .. }
        | Error::MissingColumn(_)
        | Error::UnparsableNumber { .. }
        | Error::EmptyFile
        | Error::NonPositivePrice { .. }
        | Error::WindowTooLong { .. } => 2,
        Error::NegativeEigenvalue { .. }
        | Error::NotPositiveDefinite { .. }
        | Error::NoConvergence { .. }
        | Error::SingularPoint
        | Error::DegenerateSeries
        | Error::BlocksTooSmall { .. }
        | Error::TooFewPaths(_)
        | Error::ZeroRealizedVariance => 3,
    }
}
