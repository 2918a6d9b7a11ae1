use std::fmt::Write as _;
use std::path::Path;

use super::config::{Command, GridSpec, OutputFormat, RunConfig};
use super::verify::{oracle_records, run_suite, CheckRecord, OracleGrid, Status, SUITES};
use super::CliError;
use crate::cavity::{params_from, CavityParams, ModeIndex, Speed, Squeeze};
use crate::oracles::GridPoint;
use crate::spectrum::{exact_maximum_search, linear_grid, maxima_positions, scan_theta, spectrum};

const SPECTRUM_TOL: f64 = 1e-10;
const SCAN_TOL: f64 = 1e-8;
const THETA_TOL: f64 = 1e-6;
const DEFAULT_N_MAX: usize = 16;
const DEFAULT_GRID: GridSpec = GridSpec { start: 0.0, stop: 255.0 / 256.0, count: 256 };
/// Maxima are searched strictly inside (0, 1), where N vanishes at both ends.
const MAXIMA_BRACKET: (f64, f64) = (1e-3, 1.0 - 1e-3);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    ChecksFailed(usize),
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn speed(cfg: &RunConfig) -> Result<Speed, CliError> {
    match (cfg.v, cfg.gamma.as_slice()) {
        (Some(v), []) => Ok(Speed::Velocity(v)),
        (None, [g]) => Ok(Speed::Gamma(*g)),
        (None, []) => Err(config_err("give the wall speed with --v or --gamma")),
        (None, _) => Err(config_err("this command takes a single --gamma value")),
        (Some(_), _) => Err(config_err("--v and --gamma are alternatives; give one")),
    }
}

fn speeds(cfg: &RunConfig) -> Result<Vec<Speed>, CliError> {
    match (cfg.v, cfg.gamma.is_empty()) {
        (Some(v), true) => Ok(vec![Speed::Velocity(v)]),
        (None, false) => Ok(cfg.gamma.iter().map(|&g| Speed::Gamma(g)).collect()),
        (None, true) => Err(config_err("give the wall speed with --v or --gamma")),
        (Some(_), false) => Err(config_err("--v and --gamma are alternatives; give one")),
    }
}

fn squeeze(cfg: &RunConfig) -> Result<Squeeze, CliError> {
    let given: Vec<Squeeze> = [
        cfg.rho.map(Squeeze::Rho),
        cfg.rho_power.map(Squeeze::RhoPower),
        cfg.duration.map(Squeeze::Duration),
        cfg.theta.map(Squeeze::Theta),
    ]
    .into_iter()
    .flatten()
    .collect();
    match given.as_slice() {
        [s] => Ok(*s),
        [] => Err(config_err("give the squeeze with one of --rho, --rho-power, --duration or --theta")),
        _ => Err(config_err("--rho, --rho-power, --duration and --theta are alternatives; give one")),
    }
}

fn cavity(cfg: &RunConfig) -> Result<CavityParams, CliError> {
    Ok(params_from(speed(cfg)?, squeeze(cfg)?, cfg.l_i.unwrap_or(1.0))?)
}

/// Speed alone, for commands that sweep theta themselves.
fn boost(cfg: &RunConfig, speed: Speed) -> Result<CavityParams, CliError> {
    if squeeze(cfg).is_ok() {
        return Err(config_err(format!(
            "{} sweeps theta itself; drop --rho, --rho-power, --duration and --theta",
            cfg.command.map_or("this command", Command::name)
        )));
    }
    Ok(CavityParams::new(speed, Squeeze::Theta(0.5))?)
}

fn tolerance(cfg: &RunConfig, default: f64) -> Result<f64, CliError> {
    match cfg.tol.unwrap_or(default) {
        t if t.is_finite() && t > 0.0 => Ok(t),
        t => Err(config_err(format!("--tol must be positive, got {t}"))),
    }
}

fn modes(cfg: &RunConfig) -> Result<Vec<ModeIndex>, CliError> {
    let list = if cfg.modes.is_empty() { vec![1] } else { cfg.modes.clone() };
    Ok(list.into_iter().map(ModeIndex::new).collect::<crate::Result<_>>()?)
}

fn theta_grid(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    let g = cfg.grid.unwrap_or(DEFAULT_GRID);
    let inside = |x: f64| x.is_finite() && (0.0..1.0).contains(&x);
    if !(inside(g.start) && inside(g.stop)) || g.count == 0 || g.stop < g.start {
        return Err(config_err(format!(
            "--grid {g} must satisfy 0 <= start <= stop < 1 with count >= 1"
        )));
    }
    Ok(linear_grid(g.start, g.stop, g.count))
}

fn csv_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn run_spectrum(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cavity(cfg)?;
    let n_max = cfg.n_max.unwrap_or(DEFAULT_N_MAX);
    let r = spectrum(p.d(), p.theta(), n_max, tolerance(cfg, SPECTRUM_TOL)?)?;
    let mut s = String::from("n,N_mean,tail_bound\n");
    for e in &r.entries {
        let _ = writeln!(s, "{},{},{}", e.n, csv_float(e.value), csv_float(e.tail_bound));
    }
    Ok(s)
}

pub fn run_scan(cfg: &RunConfig) -> Result<String, CliError> {
    let p = boost(cfg, speed(cfg)?)?;
    let rows = scan_theta(&modes(cfg)?, p.d(), &theta_grid(cfg)?, tolerance(cfg, SCAN_TOL)?)?;
    let mut s = String::from("theta,n,N_mean,tail_bound\n");
    for r in &rows {
        let _ = writeln!(s, "{},{},{},{}", csv_float(r.theta), r.n, csv_float(r.value), csv_float(r.tail_bound));
    }
    Ok(s)
}

pub fn run_maxima(cfg: &RunConfig) -> Result<String, CliError> {
    let theta_tol = tolerance(cfg, THETA_TOL)?;
    let modes = modes(cfg)?;
    let mut s = String::from("gamma,n,theta_max_predicted,theta_max_exact,N_at_max,multimodal\n");
    for sp in speeds(cfg)? {
        let p = boost(cfg, sp)?;
        for &n in &modes {
            let found = exact_maximum_search(n, p.d(), MAXIMA_BRACKET, theta_tol)?;
            // Of the predicted positions, report the one the search landed near.
            let predicted = maxima_positions(n, p.d())?
                .into_iter()
                .min_by(|a, b| (a - found.theta).abs().total_cmp(&(b - found.theta).abs()));
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                csv_float(p.gamma()),
                n.get(),
                predicted.map(csv_float).unwrap_or_default(),
                csv_float(found.theta),
                csv_float(found.value),
                found.multimodal
            );
        }
    }
    Ok(s)
}

fn count_failures(records: &[CheckRecord]) -> usize {
    records.iter().filter(|r| r.status == Status::Fail).count()
}

fn report(records: &[CheckRecord]) -> Result<(String, Outcome), CliError> {
    let text = serde_json::to_string_pretty(records)? + "\n";
    let outcome = match count_failures(records) {
        0 => Outcome::Passed,
        n => Outcome::ChecksFailed(n),
    };
    Ok((text, outcome))
}

pub fn run_verify(cfg: &RunConfig) -> Result<(String, Outcome), CliError> {
    let name = cfg.suite.as_deref().unwrap_or("all");
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        s => return Err(config_err(format!("unknown suite `{s}`; choose one of {} or all", SUITES.join(", ")))),
    };
    let records: Vec<CheckRecord> = names.into_iter().flat_map(run_suite).collect();
    report(&records)
}

/// Without parameters this is the `oracles` suite; with --gamma (and
/// optionally --theta, --n-max) it compares the routes on that grid.
pub fn run_oracle(cfg: &RunConfig) -> Result<(String, Outcome), CliError> {
    if cfg.gamma.is_empty() && cfg.v.is_none() {
        if cfg.theta.is_some() || cfg.n_max.is_some() {
            return Err(config_err("--theta and --n-max need --gamma or --v to define the oracle grid"));
        }
        return report(&run_suite("oracles"));
    }
    if cfg.rho.is_some() || cfg.rho_power.is_some() || cfg.duration.is_some() {
        return Err(config_err("the oracle grid is given by --gamma and --theta"));
    }
    let thetas = match cfg.theta {
        Some(t) => vec![t],
        None => vec![0.2, 0.5, 0.9],
    };
    let n_max = cfg.n_max.unwrap_or(4);
    let mut points = Vec::new();
    for sp in speeds(cfg)? {
        let gamma = CavityParams::new(sp, Squeeze::Theta(0.5))?.gamma();
        for &theta in &thetas {
            // Validates theta before any route runs.
            CavityParams::new(Speed::Gamma(gamma), Squeeze::Theta(theta))?;
            points.push(GridPoint { gamma, theta, n_max });
        }
    }
    report(&oracle_records(&OracleGrid::Custom(points)))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: path.into(), source })?;
            }
            std::fs::write(path, text).map_err(|source| CliError::Write { path: path.into(), source })
        }
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
        }
    }
}

/// Runs the configured command on a pool of `workers` threads and writes
/// its output.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let command = cfg.command.ok_or_else(|| config_err("no command given (spectrum, scan, maxima, verify, oracle)"))?;
    if let Some(f) = cfg.format {
        if f != command.native_format() {
            let native = match command.native_format() {
                OutputFormat::Csv => "CSV",
                OutputFormat::Json => "JSON",
            };
            return Err(config_err(format!("{} writes {native} only; drop --format", command.name())));
        }
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        if w == 0 {
            return Err(config_err("--workers must be at least 1"));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| CliError::Pool(e.to_string()))?;
    let (text, outcome) = pool.install(|| -> Result<(String, Outcome), CliError> {
        match command {
            Command::Spectrum => Ok((run_spectrum(cfg)?, Outcome::Passed)),
            Command::Scan => Ok((run_scan(cfg)?, Outcome::Passed)),
            Command::Maxima => Ok((run_maxima(cfg)?, Outcome::Passed)),
            Command::Verify => run_verify(cfg),
            Command::Oracle => run_oracle(cfg),
        }
    })?;
    write_output(cfg.out.as_deref(), &text)?;
    Ok(outcome)
}
