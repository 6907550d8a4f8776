//! `rattling`: simulate the hysteretic lattice, tabulate `a*`, build switching
//! patterns and run numerical self-checks.
//!
//! Exit status: 0 success, 2 bad configuration, 3 numerical failure,
//! 4 invariant violation.

mod astar;
mod outcome;
mod pattern;
mod selftest;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "rattling", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the lattice and write the event log, the fit report and plot data.
    Simulate(simulate::Args),
    /// Tabulate the propagation constant a*(λ) from all three balances.
    Astar(astar::Args),
    /// Generate a pattern, measure it and check periodic windows.
    Pattern(pattern::Args),
    /// Run the numerical self-checks.
    Selftest(selftest::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Astar(a) => astar::run(a),
        Command::Pattern(a) => pattern::run(a),
        Command::Selftest(a) => selftest::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rattling: {f}");
            ExitCode::from(f.code())
        }
    }
}
