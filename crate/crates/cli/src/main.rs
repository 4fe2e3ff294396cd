//! `extremes`: bound reports, oracle checks, constant tables and simulations.
//!
//! Exit codes: 0 ok, 2 bound violated, 3 configuration error, 4 validity gate.

mod bound;
mod common;
mod output;
mod simulate;
mod table;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use common::Failure;
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "extremes", version, about = "Poisson approximation bounds for extremes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output file; stdout when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound report for maxima, exceedances, Archimedean tails or MO geometric exceedances
    Bound(bound::BoundArgs),
    /// Run an oracle against its bound
    Verify(verify::VerifyArgs),
    /// Tail constants or tail-dependence coefficients
    Table(table::TableArgs),
    /// Seeded point configurations, copula samples or immigration-death runs
    Simulate(simulate::SimulateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Bound(a) => bound::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Table(a) => table::run(a),
        Command::Simulate(a) => simulate::run(a),
    };
    let emit = match result {
        Ok(e) => e,
        Err(f) => {
            eprintln!("{f}");
            return ExitCode::from(f.code() as u8);
        }
    };
    if let Err(e) = emit.write(cli.format, cli.out.as_deref()) {
        let f = Failure::Io(e);
        eprintln!("{f}");
        return ExitCode::from(f.code() as u8);
    }
    match emit.violation {
        Some(v) => {
            eprintln!("{v}");
            ExitCode::from(2)
        }
        None => ExitCode::SUCCESS,
    }
}
