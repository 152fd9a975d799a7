//! `vibsim` command-line driver.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;
use vibsim::VibError;

use args::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Lib(#[from] VibError),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Lib(e) if e.is_numerical() => "numerical",
            _ => "config",
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind() {
            "numerical" => 3,
            _ => 2,
        }
    }
}

fn report_error(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("VIBSIM_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("VIBSIM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("config", e.to_string().trim(), 2),
    };
    match configure_threads().and_then(|_| commands::run(&cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(e.kind(), &e.to_string(), e.exit_code()),
    }
}
