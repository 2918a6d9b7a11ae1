//! Run configuration and its flat `key = value` file format.
//!
//! Values are stored as given, before any normalization, so that a config
//! emitted and parsed again compares equal.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// N_n for n = 1..n-max at one cavity setting.
    Spectrum,
    /// N_n over a theta grid.
    Scan,
    /// Predicted and exact positions of the theta maxima.
    Maxima,
    /// Run verification suites and write a JSON report.
    Verify,
    /// Compare the closed forms with the independent routes.
    Oracle,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Scan => "scan",
            Command::Maxima => "maxima",
            Command::Verify => "verify",
            Command::Oracle => "oracle",
        }
    }

    /// Data subcommands write CSV, checking subcommands write JSON.
    pub fn native_format(self) -> OutputFormat {
        match self {
            Command::Spectrum | Command::Scan | Command::Maxima => OutputFormat::Csv,
            Command::Verify | Command::Oracle => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// `count` evenly spaced points from `start` to `stop`, written `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("grid `{s}` must have the form start:stop:count"));
        }
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("grid value `{x}`: {e}"));
        let count = parts[2].trim().parse::<usize>().map_err(|e| format!("grid count `{}`: {e}", parts[2]))?;
        Ok(GridSpec { start: num(parts[0])?, stop: num(parts[1])?, count })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{:?}:{}", self.start, self.stop, self.count)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub v: Option<f64>,
    pub gamma: Vec<f64>,
    pub rho: Option<f64>,
    pub rho_power: Option<u32>,
    pub duration: Option<f64>,
    pub l_i: Option<f64>,
    pub theta: Option<f64>,
    pub n_max: Option<usize>,
    pub modes: Vec<usize>,
    pub tol: Option<f64>,
    pub grid: Option<GridSpec>,
    pub suite: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub workers: Option<usize>,
}

fn join<T: fmt::Debug>(xs: &[T]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| format!("{key}: `{x}`: {e}")))
        .collect()
}

impl RunConfig {
    /// Flat text form: one `key = value` per set field.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(c) = self.command {
            line("command", c.name().into());
        }
        if let Some(x) = self.v {
            line("v", format!("{x:?}"));
        }
        if !self.gamma.is_empty() {
            line("gamma", join(&self.gamma));
        }
        if let Some(x) = self.rho {
            line("rho", format!("{x:?}"));
        }
        if let Some(x) = self.rho_power {
            line("rho-power", x.to_string());
        }
        if let Some(x) = self.duration {
            line("duration", format!("{x:?}"));
        }
        if let Some(x) = self.l_i {
            line("l-i", format!("{x:?}"));
        }
        if let Some(x) = self.theta {
            line("theta", format!("{x:?}"));
        }
        if let Some(x) = self.n_max {
            line("n-max", x.to_string());
        }
        if !self.modes.is_empty() {
            line("n", join(&self.modes));
        }
        if let Some(x) = self.tol {
            line("tol", format!("{x:?}"));
        }
        if let Some(g) = self.grid {
            line("grid", g.to_string());
        }
        if let Some(x) = &self.suite {
            line("suite", x.clone());
        }
        if let Some(x) = &self.out {
            line("out", x.display().to_string());
        }
        if let Some(x) = self.format {
            line("format", x.name().into());
        }
        if let Some(x) = self.workers {
            line("workers", x.to_string());
        }
        s
    }

    /// Parses the flat text form; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| CliError::Config(format!("line {}: {msg}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|e| err(format!("{key}: `{v}`: {e}")));
            let int = |v: &str| v.parse::<usize>().map_err(|e| err(format!("{key}: `{v}`: {e}")));
            match key {
                "command" => {
                    cfg.command = Some(Command::from_str(value, true).map_err(|e| err(format!("command: {e}")))?);
                }
                "v" => cfg.v = Some(num(value)?),
                "gamma" => cfg.gamma = parse_list(key, value).map_err(err)?,
                "rho" => cfg.rho = Some(num(value)?),
                "rho-power" => cfg.rho_power = Some(value.parse().map_err(|e| err(format!("rho-power: {e}")))?),
                "duration" => cfg.duration = Some(num(value)?),
                "l-i" => cfg.l_i = Some(num(value)?),
                "theta" => cfg.theta = Some(num(value)?),
                "n-max" => cfg.n_max = Some(int(value)?),
                "n" => cfg.modes = parse_list(key, value).map_err(err)?,
                "tol" => cfg.tol = Some(num(value)?),
                "grid" => cfg.grid = Some(value.parse().map_err(err)?),
                "suite" => cfg.suite = Some(value.to_string()),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "format" => {
                    cfg.format = Some(OutputFormat::from_str(value, true).map_err(|e| err(format!("format: {e}")))?);
                }
                "workers" => cfg.workers = Some(int(value)?),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    /// Applies every field set in `flags` on top of `self`. A speed or
    /// squeeze given on the command line replaces the whole group from the
    /// file, so the two sources never combine into a conflicting pair.
    pub fn overlay(mut self, flags: RunConfig) -> RunConfig {
        if flags.v.is_some() || !flags.gamma.is_empty() {
            self.v = flags.v;
            self.gamma = flags.gamma;
        }
        if flags.rho.is_some() || flags.rho_power.is_some() || flags.duration.is_some() || flags.theta.is_some() {
            self.rho = flags.rho;
            self.rho_power = flags.rho_power;
            self.duration = flags.duration;
            self.theta = flags.theta;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(command, l_i, n_max, tol, grid, suite, out, format, workers);
        if !flags.modes.is_empty() {
            self.modes = flags.modes;
        }
        self
    }
}
