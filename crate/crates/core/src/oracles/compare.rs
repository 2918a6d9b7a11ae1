//! Pairwise comparison of transform routes over a parameter grid.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::double_quad::v_double_quadrature;
use super::ode::{default_mode_truncation, evolve_transform, StepControl};
use super::region::v_region_integration;
use crate::cavity::{CavityParams, ModeIndex, Speed, Squeeze};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::transform::{closed_form_matrices, transform_matrices, Route};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteId {
    ClosedForm,
    RegionIntegration,
    DoubleQuadrature,
    Series,
    Ode,
}

impl RouteId {
    pub fn name(self) -> &'static str {
        match self {
            RouteId::ClosedForm => "closed_form",
            RouteId::RegionIntegration => "region_integration",
            RouteId::DoubleQuadrature => "double_quadrature",
            RouteId::Series => "series",
            RouteId::Ode => "ode",
        }
    }

    /// Routes that only produce the pair-creation block.
    fn v_only(self) -> bool {
        matches!(self, RouteId::RegionIntegration | RouteId::DoubleQuadrature)
    }
}

/// One parameter point; entries with n, n' <= n_max are compared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub gamma: f64,
    pub theta: f64,
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub quad: QuadratureConfig,
    pub series_truncation: usize,
    /// Evolution basis size; `None` uses the default support rule.
    pub ode_modes: Option<usize>,
    pub step: StepControl,
    /// Fixed pass threshold; `None` compares against the combined error budget.
    pub threshold: Option<f64>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            series_truncation: 512,
            ode_modes: None,
            step: StepControl::default(),
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointOutcome {
    pub point: GridPoint,
    pub max_abs_diff: Option<f64>,
    pub budget: f64,
    pub passed: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub route_a: RouteId,
    pub route_b: RouteId,
    /// Largest difference over the points where both routes succeeded.
    pub max_abs_diff: f64,
    pub grid: Vec<GridPoint>,
    pub per_point: Vec<PointOutcome>,
}

impl OracleReport {
    pub fn all_passed(&self) -> bool {
        self.per_point.iter().all(|p| p.passed)
    }
}

struct RouteOutput {
    u: Option<DMatrix<Complex64>>,
    v: DMatrix<Complex64>,
    err: f64,
}

fn run_route(route: RouteId, pt: &GridPoint, opts: &CompareOptions) -> Result<RouteOutput> {
    let p = CavityParams::new(Speed::Gamma(pt.gamma), Squeeze::Theta(pt.theta))?;
    let n = pt.n_max;
    if n == 0 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    let pointwise = |f: &dyn Fn(ModeIndex, ModeIndex) -> Result<(Complex64, f64)>| -> Result<RouteOutput> {
        let mut v = DMatrix::zeros(n, n);
        let mut err: f64 = 0.0;
        for i in 1..=n {
            for j in 1..=n {
                let (val, e) = f(ModeIndex::new(i)?, ModeIndex::new(j)?).map_err(|e| e.at(i, j))?;
                v[(i - 1, j - 1)] = val;
                err = err.max(e);
            }
        }
        Ok(RouteOutput { u: None, v, err })
    };
    match route {
        RouteId::ClosedForm => {
            let t = closed_form_matrices(p.d(), p.theta(), n)?;
            Ok(RouteOutput { u: Some(t.u), v: t.v, err: t.err })
        }
        RouteId::RegionIntegration => pointwise(&|a, b| Ok((v_region_integration(a, b, p.d(), p.theta())?, 1e-14 * p.d()))),
        RouteId::DoubleQuadrature => pointwise(&|a, b| v_double_quadrature(a, b, p.d(), p.theta(), &opts.quad)),
        RouteId::Series => {
            let route = Route::Series { truncation: opts.series_truncation, quad: opts.quad };
            let t = transform_matrices(&p, n, &route)?;
            Ok(RouteOutput { u: Some(t.u), v: t.v, err: t.err })
        }
        RouteId::Ode => {
            let modes = match opts.ode_modes {
                Some(m) => m,
                None => default_mode_truncation(p.d(), p.theta(), n)?,
            };
            let t = evolve_transform(&p, modes, n, &opts.step)?;
            Ok(RouteOutput { u: Some(t.u), v: t.v, err: t.err })
        }
    }
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Runs every route at every grid point, then compares all route pairs.
/// A route failure at a point is recorded as a failed outcome for each
/// pair involving it; the remaining points are still compared.
pub fn compare_routes(grid: &[GridPoint], routes: &[RouteId], opts: &CompareOptions) -> Result<Vec<OracleReport>> {
    if routes.len() < 2 {
        return Err(Error::InvalidParameter("route comparison needs at least two routes".into()));
    }
    let outputs: Vec<Vec<std::result::Result<RouteOutput, String>>> = grid
        .iter()
        .map(|pt| routes.iter().map(|r| run_route(*r, pt, opts).map_err(|e| e.to_string())).collect())
        .collect();
    let mut reports = Vec::new();
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            let mut per_point = Vec::with_capacity(grid.len());
            let mut worst: f64 = 0.0;
            for (g, pt) in grid.iter().enumerate() {
                let outcome = match (&outputs[g][i], &outputs[g][j]) {
                    (Ok(a), Ok(b)) => {
                        let mut diff = max_diff(&a.v, &b.v);
                        if let (Some(ua), Some(ub)) = (&a.u, &b.u) {
                            if !(routes[i].v_only() || routes[j].v_only()) {
                                diff = diff.max(max_diff(ua, ub));
                            }
                        }
                        let budget = a.err + b.err;
                        worst = worst.max(diff);
                        let limit = opts.threshold.unwrap_or(budget);
                        PointOutcome { point: *pt, max_abs_diff: Some(diff), budget, passed: diff <= limit, failure: None }
                    }
                    (a, b) => {
                        let msg = [a.as_ref().err(), b.as_ref().err()]
                            .into_iter()
                            .flatten()
                            .cloned()
                            .collect::<Vec<_>>()
                            .join("; ");
                        PointOutcome { point: *pt, max_abs_diff: None, budget: f64::INFINITY, passed: false, failure: Some(msg) }
                    }
                };
                per_point.push(outcome);
            }
            reports.push(OracleReport {
                route_a: routes[i],
                route_b: routes[j],
                max_abs_diff: worst,
                grid: grid.to_vec(),
                per_point,
            });
        }
    }
    Ok(reports)
}
