//! Batch front end: spectra, theta scans and maxima tables as CSV,
//! verification suites and route comparisons as JSON reports.

mod args;
mod config;
mod run;
mod verify;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

pub use args::Cli;
pub use config::{Command, GridSpec, OutputFormat, RunConfig};
pub use run::{execute, run_maxima, run_oracle, run_scan, run_spectrum, run_verify, Outcome};
pub use verify::{run_suite, CheckRecord, Status, SUITES};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read config file {path}: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Parses the process arguments, runs the command and maps the result to
/// the exit-code contract: 0 when everything ran and every check passed,
/// 1 when a check failed, 2 on configuration or I/O errors.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.into_config().and_then(|cfg| execute(&cfg)) {
        Ok(Outcome::Passed) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed(n)) => {
            eprintln!("dce: {n} check(s) failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("dce: {e}");
            ExitCode::from(2)
        }
    }
}
