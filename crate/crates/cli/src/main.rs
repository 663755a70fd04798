//! Command-line driver for partition norms, moment bounds and concentration
//! experiments. Validation failures exit with status 2 and a one-line
//! diagnostic.

mod args;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] concentro::Error),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid config {}: {reason}", path.display())]
    Config { path: PathBuf, reason: String },
    #[error("{0}")]
    Usage(String),
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            return fail(&CliError::Usage("--workers must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            return fail(&CliError::Usage(format!("cannot start worker pool: {e}")));
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    let msg = e.to_string().replace('\n', " ");
    eprintln!("error: {msg}");
    ExitCode::from(2)
}
