//! Heisenberg evolution of the cavity-mode operators under the generator,
//! truncated to M instantaneous modes.
//!
//! Writing a(chi) = P a_in + Q a_in+ and R = Q*, the pair X = [P; R] obeys
//! dX/dchi = K X with K = [[-i h, -i g], [i g*, i h*]] and X(0) = [I; 0].
//! K satisfies K+ eta + eta K = 0 for eta = diag(I, -I), so X+ eta X = I is
//! conserved exactly; its drift measures integration error only.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bogoliubov::generator_any_size;
use crate::cavity::CavityParams;
use crate::error::{Error, Result};
use crate::transform::{RouteTag, TransformMatrices};

/// Largest mode basis accepted by the evolution oracle.
pub const MAX_MODES: usize = 1024;
/// Above this value of chi_f * ||K||_1 the exponential sub-route is refused.
pub const EXPONENTIAL_LIMIT: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeMethod {
    /// Embedded 5(4) Dormand–Prince stepping.
    Adaptive,
    /// Scaling-and-squaring exponential of the whole generator.
    Exponential,
    /// Exponential when permitted, adaptive otherwise.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub method: OdeMethod,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Abort when max |X+ eta X - I| exceeds this.
    pub drift_threshold: f64,
    pub max_steps: usize,
    pub min_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            method: OdeMethod::Auto,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            drift_threshold: 1e-6,
            max_steps: 2_000_000,
            min_step: 1e-14,
        }
    }
}

/// max(64, 8 ceil(n d^theta)): the basis must cover the modes that an
/// output mode n draws from.
pub fn default_mode_truncation(d: f64, theta: f64, n_interest: usize) -> Result<usize> {
    let need = 8.0 * (n_interest as f64 * d.powf(theta)).ceil();
    let m = if need.is_finite() { (need as usize).max(64) } else { usize::MAX };
    if m > MAX_MODES {
        return Err(Error::TruncationLimit { requested: m, limit: MAX_MODES });
    }
    Ok(m)
}

fn generator_block(p: &CavityParams, modes: usize) -> Result<DMatrix<Complex64>> {
    let gm = generator_any_size(p.v(), modes)?;
    let i = Complex64::new(0.0, 1.0);
    let mut k = DMatrix::zeros(2 * modes, 2 * modes);
    k.view_mut((0, 0), (modes, modes)).copy_from(&gm.h.map(|z| -i * z));
    k.view_mut((0, modes), (modes, modes)).copy_from(&gm.g.map(|z| -i * z));
    k.view_mut((modes, 0), (modes, modes)).copy_from(&gm.g.map(|z| i * z.conj()));
    k.view_mut((modes, modes), (modes, modes)).copy_from(&gm.h.map(|z| i * z.conj()));
    Ok(k)
}

fn one_norm(k: &DMatrix<Complex64>) -> f64 {
    k.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// max |X+ eta X - I|.
pub fn symplectic_drift(x: &DMatrix<Complex64>, modes: usize) -> f64 {
    let top = x.rows(0, modes);
    let bottom = x.rows(modes, modes);
    let gram = top.adjoint() * top - bottom.adjoint() * bottom;
    let mut worst: f64 = 0.0;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let delta = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - delta).norm());
        }
    }
    worst
}

/// Outcome of one evolution, with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub transform: TransformMatrices,
    pub method: OdeMethod,
    pub steps: usize,
    pub max_drift: f64,
}

/// Evolves the first `columns` input modes through the contraction in a
/// basis of `modes` instantaneous modes.
pub fn evolve_bogoliubov_ode(p: &CavityParams, modes: usize, columns: usize, control: &StepControl) -> Result<Evolution> {
    if modes == 0 || columns == 0 || columns > modes {
        return Err(Error::InvalidParameter(format!("need 1 <= columns ({columns}) <= modes ({modes})")));
    }
    if modes > MAX_MODES {
        return Err(Error::TruncationLimit { requested: modes, limit: MAX_MODES });
    }
    let chi_f = p.chi_f();
    if !chi_f.is_finite() {
        return Err(Error::InvalidParameter("final auxiliary time is not finite".into()));
    }
    let k = generator_block(p, modes)?;
    let mut x0 = DMatrix::zeros(2 * modes, columns);
    for c in 0..columns {
        x0[(c, c)] = Complex64::new(1.0, 0.0);
    }
    let size = chi_f * one_norm(&k);
    let method = match control.method {
        OdeMethod::Auto if size < EXPONENTIAL_LIMIT => OdeMethod::Exponential,
        OdeMethod::Auto => OdeMethod::Adaptive,
        m => m,
    };
    let (x, steps, max_drift) = match method {
        OdeMethod::Exponential => {
            if size >= EXPONENTIAL_LIMIT {
                return Err(Error::InvalidParameter(format!(
                    "exponential sub-route needs chi_f * ||K|| < {EXPONENTIAL_LIMIT}, got {size:.1}"
                )));
            }
            let x = (k * Complex64::new(chi_f, 0.0)).exp() * x0;
            let drift = symplectic_drift(&x, modes);
            if drift > control.drift_threshold {
                return Err(Error::UnitarityDrift { drift, threshold: control.drift_threshold, chi: chi_f });
            }
            (x, 1, drift)
        }
        _ => dopri5(&k, x0, chi_f, modes, control)?,
    };
    let u = x.view((0, 0), (columns, columns)).into_owned();
    let v = x.view((modes, 0), (columns, columns)).map(|z| z.conj());
    Ok(Evolution {
        transform: TransformMatrices {
            u,
            v,
            d: p.d(),
            theta: p.theta(),
            route: RouteTag::OdeOracle,
            err: max_drift + control.rel_tol * steps as f64,
            degenerate: Vec::new(),
        },
        method,
        steps,
        max_drift,
    })
}

/// Square transform of size `columns` by the evolution oracle.
pub fn evolve_transform(p: &CavityParams, modes: usize, columns: usize, control: &StepControl) -> Result<TransformMatrices> {
    Ok(evolve_bogoliubov_ode(p, modes, columns, control)?.transform)
}

const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// Fifth-order minus fourth-order weights; the seventh stage enters with -1/40.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

fn combine(x: &DMatrix<Complex64>, h: f64, weights: &[f64], ks: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let mut out = x.clone();
    for (w, k) in weights.iter().zip(ks) {
        if *w != 0.0 {
            out.zip_apply(k, |o, kv| *o += kv * (h * w));
        }
    }
    out
}

fn dopri5(
    k: &DMatrix<Complex64>,
    mut x: DMatrix<Complex64>,
    chi_f: f64,
    modes: usize,
    control: &StepControl,
) -> Result<(DMatrix<Complex64>, usize, f64)> {
    debug_assert_eq!(C.len(), 6);
    let mut chi = 0.0;
    let mut h = (0.01 / one_norm(k).max(1.0)).min(chi_f);
    let mut steps = 0usize;
    let mut max_drift: f64 = 0.0;
    let mut k1 = k * &x;
    while chi < chi_f {
        if steps >= control.max_steps {
            return Err(Error::Integration(format!("step budget {} exhausted at chi = {chi}", control.max_steps)));
        }
        if h < control.min_step {
            return Err(Error::StepUnderflow { chi, step: h });
        }
        let h_try = h.min(chi_f - chi);
        let k2 = k * combine(&x, h_try, &A2, std::slice::from_ref(&k1));
        let k3 = k * combine(&x, h_try, &A3, &[k1.clone(), k2.clone()]);
        let k4 = k * combine(&x, h_try, &A4, &[k1.clone(), k2.clone(), k3.clone()]);
        let k5 = k * combine(&x, h_try, &A5, &[k1.clone(), k2.clone(), k3.clone(), k4.clone()]);
        let k6 = k * combine(&x, h_try, &A6, &[k1.clone(), k2.clone(), k3.clone(), k4.clone(), k5.clone()]);
        let stages = [k1.clone(), k2, k3, k4, k5, k6];
        let x_new = combine(&x, h_try, &B, &stages);
        let k7 = k * &x_new;
        let mut err_norm: f64 = 0.0;
        for idx in 0..x.len() {
            let mut e = k7[idx] * E[6];
            for (s, w) in stages.iter().zip(E.iter()) {
                if *w != 0.0 {
                    e += s[idx] * *w;
                }
            }
            let scale = control.abs_tol + control.rel_tol * x[idx].norm().max(x_new[idx].norm());
            err_norm = err_norm.max((e * h_try).norm() / scale);
        }
        if err_norm <= 1.0 {
            chi += h_try;
            x = x_new;
            k1 = k7;
            steps += 1;
            let drift = symplectic_drift(&x, modes);
            max_drift = max_drift.max(drift);
            if drift > control.drift_threshold {
                return Err(Error::UnitarityDrift { drift, threshold: control.drift_threshold, chi });
            }
        }
        let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
        h = h_try * factor;
    }
    Ok((x, steps, max_drift))
}
