mod args;
mod asymptotics;
mod estimate;
mod manifest;
mod simulate;

use std::process::ExitCode;

use clap::Parser;
use paretail::TailError;

use args::{Cli, Command};

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<TailError> for CliError {
    fn from(e: TailError) -> Self {
        let msg = e.to_string();
        match e {
            TailError::Parse { .. }
            | TailError::NonPositive { .. }
            | TailError::TooFewObservations(_)
            | TailError::Io(_) => CliError::Data(msg),
            TailError::KOutOfRange { .. }
            | TailError::BelowThreshold { .. }
            | TailError::InvalidArgument(_) => CliError::Usage(msg),
            TailError::NonEstimable(_)
            | TailError::Singular(_)
            | TailError::NoConvergence(_)
            | TailError::DegenerateChain(_)
            | TailError::StudyAborted(_) => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Estimate(a) => estimate::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Asymptotics(a) => asymptotics::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
