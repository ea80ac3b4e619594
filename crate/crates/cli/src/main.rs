//! `exciton-index`: count excitons of a molecule described by a JSON instance.
//!
//! Exit status: 0 on success, 1 for bad input or usage, 2 when the pipeline
//! fails an internal-consistency check.

mod commands;
mod failure;
mod threads;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use failure::{Failure, EXIT_INPUT};
use threads::{worker_count, THREADS_VAR};

#[derive(Debug, Parser)]
#[command(name = "exciton-index", version, about = "Spectral-flow exciton counts for branched molecules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance file and print a summary.
    Validate { path: PathBuf },
    /// Run the full pipeline and print the index report as JSON.
    Report {
        path: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
        /// Require the band count N; fail if m + d0 + dpi is odd.
        #[arg(long)]
        band: bool,
    },
    /// Write the unwrapped eigenphase branches as CSV.
    Trace {
        path: PathBuf,
        #[arg(long, value_name = "OUT")]
        csv: Option<PathBuf>,
    },
    /// Repeat the report with all edge lengths scaled by each factor.
    Sweep {
        path: PathBuf,
        /// Comma-separated positive integers, e.g. "1,2,4,8,16".
        #[arg(long)]
        scales: String,
        #[arg(long, value_name = "OUT")]
        csv: Option<PathBuf>,
    },
    /// Run the randomized index-theorem and oracle-equivalence suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = worker_count(std::env::var(THREADS_VAR).ok().as_deref())?;
    match cli.command {
        Command::Validate { path } => {
            println!("{}", commands::validate(&path)?);
            Ok(())
        }
        Command::Report { path, json, band } => commands::report(&path, json.as_deref(), band),
        Command::Trace { path, csv } => commands::trace(&path, csv.as_deref()),
        Command::Sweep { path, scales, csv } => commands::sweep(&path, &scales, csv.as_deref()),
        Command::Selftest { seed, count } => commands::selftest(seed, count, threads),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
