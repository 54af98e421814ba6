mod args;
mod commands;
mod preview;
mod resize;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failure classes; each maps to a fixed exit status.
#[derive(Debug)]
pub enum CliError {
    Io(String),
    Backend(String),
    Config(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 2,
            CliError::Backend(_) => 3,
            CliError::Config(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Backend(m) | CliError::Config(m) => m,
        }
    }
}

impl From<layerpeel::LoadError> for CliError {
    fn from(e: layerpeel::LoadError) -> Self {
        CliError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Decompose(a) => commands::decompose(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Synth(a) => commands::synth(&a),
        Command::Composite(a) => commands::composite(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("layerpeel: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
