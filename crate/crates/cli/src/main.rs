//! `flipflop`: solve, inspect, simulate and verify the two-stage electoral
//! competition game from the command line.

mod commands;
mod config;
mod error;
mod render;

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Flags, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "flipflop", version, about = "Equilibria of electoral competition with costly platform adjustment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// First-stage equilibrium, thresholds and region boundaries
    Solve(Flags),
    /// Partition of the median's support by second-stage status
    Regions(Flags),
    /// Ex-ante payoffs at given platforms, and the subgame at --m
    Payoff(Flags),
    /// Seeded Monte Carlo of the full game with behavioural checks
    Simulate(Flags),
    /// Comparative statics over electoral and organizational costs
    Sweep(Flags),
    /// Grid and closed-form oracle checks on built-in fixtures
    Verify(Flags),
}

impl Command {
    fn split(&self) -> (&'static str, &Flags) {
        match self {
            Command::Solve(f) => ("solve", f),
            Command::Regions(f) => ("regions", f),
            Command::Payoff(f) => ("payoff", f),
            Command::Simulate(f) => ("simulate", f),
            Command::Sweep(f) => ("sweep", f),
            Command::Verify(f) => ("verify", f),
        }
    }
}

fn backend_name(workers: usize) -> &'static str {
    if cfg!(feature = "parallel") && workers != 1 {
        "parallel"
    } else {
        "sequential"
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let (name, flags) = cli.command.split();
    let cfg = RunConfig::resolve(name, flags)?;
    let start = Instant::now();
    let output = match cli.command {
        Command::Solve(_) => commands::solve(&cfg),
        Command::Regions(_) => commands::regions(&cfg),
        Command::Payoff(_) => commands::payoff(&cfg),
        Command::Simulate(_) => commands::simulate_cmd(&cfg),
        Command::Sweep(_) => commands::sweep(&cfg),
        Command::Verify(_) => commands::verify(&cfg),
    }?;
    let exit_code = output.failure.as_ref().map_or(0, CliError::exit_code);
    let diagnostics = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "backend": backend_name(cfg.workers),
        "elapsed_seconds": start.elapsed().as_secs_f64(),
        "exit_code": exit_code,
        "message": output.failure.as_ref().map(ToString::to_string),
        "warnings": output.warnings,
    });
    let config = serde_json::to_value(&cfg).map_err(|e| CliError::Invalid(format!("json: {e}")))?;
    let text = render::render(config, &output, diagnostics, cfg.format)?;
    match &cfg.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", path.display())))?
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    if let Some(failure) = output.failure {
        eprintln!("error: {failure}");
    }
    Ok(ExitCode::from(exit_code))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
