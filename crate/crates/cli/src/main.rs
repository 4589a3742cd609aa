use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod report;

use args::{Cli, Command};

/// User-facing failure: bad input (exit 2) or numerical breakdown (exit 3).
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<flipscore::Error> for CliError {
    fn from(e: flipscore::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(a) => commands::test(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Warpbreaks(a) => commands::warpbreaks(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = match &e {
                CliError::Input(m) => format!("error: {m}"),
                CliError::Numerical(m) => format!("numerical failure: {m}"),
            };
            eprintln!("{msg}");
            ExitCode::from(e.code())
        }
    }
}
