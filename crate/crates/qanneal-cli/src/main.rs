//! `qanneal`: schedules, sweeps, CRAB runs, disordered-chain runs and fits.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

use config::Settings;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl From<qanneal::error::Error> for CliError {
    fn from(e: qanneal::error::Error) -> Self {
        use qanneal::error::Error as E;
        match e {
            E::Invalid(_) | E::Unsupported(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qanneal", version, about = "Annealing schedules and defect-density scaling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a schedule as t,g,gdot.
    Schedule(Settings),
    /// Evolve one (L, T) point and report the final defect density.
    Evolve(Settings),
    /// Defect density over an L x T grid.
    Sweep(Settings),
    /// CRAB optimisation with random restarts.
    Crab(Settings),
    /// Disordered-chain runs over sizes, seeds, families and durations.
    Disordered(Settings),
    /// Power-law fits and onset times from a sweep CSV.
    Fit(Settings),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, settings) = match cli.command {
        Command::Schedule(s) => ("schedule", s),
        Command::Evolve(s) => ("evolve", s),
        Command::Sweep(s) => ("sweep", s),
        Command::Crab(s) => ("crab", s),
        Command::Disordered(s) => ("disordered", s),
        Command::Fit(s) => ("fit", s),
    };
    let settings = settings.resolve()?;
    if let Some(n) = settings.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match name {
        "schedule" => commands::schedule(settings),
        "evolve" => commands::evolve(settings),
        "sweep" => commands::sweep(settings),
        "crab" => commands::crab(settings),
        "disordered" => commands::disordered(settings),
        _ => commands::fit(settings),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qanneal: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 1,
                CliError::Numerical(_) => 2,
            })
        }
    }
}
