//! Batch front-end: every computation as a subcommand, with JSON metadata and CSV
//! tables as output.
//!
//! Exit status is 0 when every checked identity holds, 1 when one fails or cannot be
//! evaluated, and 2 for invalid usage or configuration.

mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;

use crate::config::{Command, Flags, RunConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "fractal-spectra", version, about = "Spectra and zeta functions of fractal Laplacians")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(cli.command, &cli.flags) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = match commands::run(&cfg) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    let written = match &cfg.out {
        Some(dir) => report.write_dir(dir),
        None => report.write_stdout(),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write results: {e}");
        return ExitCode::from(EXIT_FAILURE);
    }
    report.print_checks();
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}
