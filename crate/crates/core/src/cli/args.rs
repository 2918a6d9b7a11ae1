use std::path::PathBuf;

use clap::Parser;

use super::config::{Command, GridSpec, OutputFormat, RunConfig};
use super::CliError;

/// Particle creation in a uniformly contracting cavity.
///
/// Data commands (spectrum, scan, maxima) write CSV; verify and oracle
/// write a JSON report and exit with status 1 if any check fails.
#[derive(Debug, Parser)]
#[command(name = "dce", version)]
pub struct Cli {
    /// What to compute; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,

    /// Flat key = value file with the same keys as the long flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Wall speed in units of c.
    #[arg(long = "v", conflicts_with = "gamma")]
    pub v: Option<f64>,
    /// Lorentz factor of the wall; a comma list for `maxima` and `oracle`.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,

    /// Final over initial length.
    #[arg(long, group = "squeeze")]
    pub rho: Option<f64>,
    /// Squeeze to rho = d^-k.
    #[arg(long = "rho-power", group = "squeeze")]
    pub rho_power: Option<u32>,
    /// Contraction time, in the units of --l-i.
    #[arg(long, group = "squeeze")]
    pub duration: Option<f64>,
    /// Initial cavity length (default 1).
    #[arg(long = "l-i")]
    pub l_i: Option<f64>,
    /// Fractional squeeze phase in [0, 1), bypassing rho.
    #[arg(long, group = "squeeze")]
    pub theta: Option<f64>,

    /// Highest mode for `spectrum` and `oracle`.
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Modes for `scan` and `maxima`, comma separated.
    #[arg(long = "n", value_delimiter = ',')]
    pub modes: Vec<usize>,
    /// Accuracy target: bound on the summation tail for data commands,
    /// theta tolerance for `maxima`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Theta grid as start:stop:count.
    #[arg(long)]
    pub grid: Option<GridSpec>,
    /// Verification suite name, or `all`.
    #[arg(long)]
    pub suite: Option<String>,

    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

impl Cli {
    fn flags(self) -> (Option<PathBuf>, RunConfig) {
        let cfg = RunConfig {
            command: self.command,
            v: self.v,
            gamma: self.gamma,
            rho: self.rho,
            rho_power: self.rho_power,
            duration: self.duration,
            l_i: self.l_i,
            theta: self.theta,
            n_max: self.n_max,
            modes: self.modes,
            tol: self.tol,
            grid: self.grid,
            suite: self.suite,
            out: self.out,
            format: self.format,
            workers: self.workers,
        };
        (self.config, cfg)
    }

    /// Reads the config file, if any, and overlays the flags on it.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let (path, flags) = self.flags();
        let base = match path {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|source| CliError::ReadConfig { path, source })?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        Ok(base.overlay(flags))
    }
}
