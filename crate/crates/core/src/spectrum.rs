//! Mean number of particles created in each final mode, its asymptotic
//! estimators, and the zero/maximum structure as a function of theta.
//!
//! N_n = (d-1)^2 n / pi^2 * sum_{k>=1} f(k) sin^2(pi s(k)), with
//! f(k) = k / ((n q + k)^2 (n + k q')^2), s(k) = (q-1)(n + k q')/(d-1),
//! q = d^theta and q' = d^(1-theta).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::cavity::{CavityParams, ModeIndex};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::summation::CompensatedSum;
use crate::transform::check_doppler_theta;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Largest number of series terms summed for one mode.
pub const MAX_TERMS: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParticleNumber {
    pub value: f64,
    /// Bound on |value - exact|.
    pub tail_bound: f64,
    pub terms: usize,
    /// False when the term budget ran out before the bound met the tolerance.
    pub converged: bool,
}

struct Series {
    n: f64,
    q: f64,
    qc: f64,
    s0: f64,
    s1: f64,
    scale: f64,
}

impl Series {
    fn new(n: usize, d: f64, theta: f64) -> Self {
        let q = d.powf(theta);
        let qc = d.powf(1.0 - theta);
        let nf = n as f64;
        let reduce = |x: f64| x - x.round();
        Series {
            n: nf,
            q,
            qc,
            s0: reduce((q - 1.0) * nf / (d - 1.0)),
            s1: reduce((q - 1.0) * qc / (d - 1.0)),
            scale: (d - 1.0) * (d - 1.0) * nf / (PI * PI),
        }
    }

    #[inline]
    fn weight(&self, x: f64) -> f64 {
        let a = self.n * self.q + x;
        let b = self.n + x * self.qc;
        x / (a * a * b * b)
    }

    fn weight_slope(&self, x: f64) -> f64 {
        let a = self.n * self.q + x;
        let b = self.n + x * self.qc;
        self.weight(x) * (1.0 / x - 2.0 / a - 2.0 * self.qc / b)
    }

    #[inline]
    fn term(&self, k: usize) -> f64 {
        let s = self.s0 + k as f64 * self.s1;
        let sn = (PI * (s - s.round())).sin();
        self.weight(k as f64) * sn * sn
    }

    /// int_{from}^inf f(x) dx via x = from / t.
    fn weight_integral(&self, from: f64) -> f64 {
        let cfg = QuadratureConfig { rel_tol: 1e-12, abs_tol: 0.0, max_subdivisions: 2000, oscillation_split: false };
        let r = integrate(
            |t: f64| {
                if t <= 0.0 {
                    0.0
                } else {
                    self.weight(from / t) * from / (t * t)
                }
            },
            &[0.0, 0.5, 1.0],
            &cfg,
        );
        r.value
    }
}

/// N_n at (d, theta), summed until the error bound falls below `tol`.
///
/// The neglected tail is replaced by half the integral of f beyond the last
/// term (sin^2 averages to 1/2). The bound covers the midpoint-rule error of
/// that integral and the oscillating remainder, which Abel summation bounds
/// by f(M+1) / (2 |sin(pi s1)|) whenever the phase step s1 is not an integer.
pub fn mean_particle_number(n: ModeIndex, d: f64, theta: f64, tol: f64) -> Result<ParticleNumber> {
    check_doppler_theta(d, theta)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    if theta == 0.0 {
        return Ok(ParticleNumber { value: 0.0, tail_bound: 0.0, terms: 0, converged: true });
    }
    let s = Series::new(n.get(), d, theta);
    let start = (8.0 * s.n * s.q).ceil().max(64.0);
    let mut target = if start < MAX_TERMS as f64 { start as usize } else { MAX_TERMS };
    let mut acc = CompensatedSum::new();
    let mut done = 0usize;
    let sin_step = (PI * s.s1).sin().abs();
    loop {
        for k in done + 1..=target {
            acc.add(s.term(k));
        }
        done = target;
        let m = done as f64;
        let rest = s.weight_integral(m + 0.5);
        let midpoint = s.weight_slope(m + 0.5).abs() / 12.0;
        let oscillating = if sin_step > 0.0 {
            (0.5 * s.weight(m + 1.0) / sin_step).min(0.5 * rest)
        } else {
            0.5 * rest
        };
        let partial = acc.value();
        let value = s.scale * (partial + 0.5 * rest);
        let bound = s.scale * (midpoint + oscillating) + 4.0 * f64::EPSILON * value.abs();
        if bound <= tol || done >= MAX_TERMS {
            return Ok(ParticleNumber { value, tail_bound: bound, terms: done, converged: bound <= tol });
        }
        target = (2 * done).min(MAX_TERMS);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub n: usize,
    pub value: f64,
    pub tail_bound: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub d: f64,
    pub theta: f64,
    pub entries: Vec<SpectrumEntry>,
    pub n_max: usize,
}

/// N_n for n = 1..=n_max. Modes are evaluated in parallel; each sum keeps
/// its own fixed order, so results do not depend on the worker count.
pub fn spectrum(d: f64, theta: f64, n_max: usize, tol: f64) -> Result<SpectrumResult> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    check_doppler_theta(d, theta)?;
    let entries = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let r = mean_particle_number(ModeIndex::new(n)?, d, theta, tol)?;
            Ok(SpectrumEntry { n, value: r.value, tail_bound: r.tail_bound, converged: r.converged })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumResult { d, theta, entries, n_max })
}

/// Plateau height [ln(2 pi n) + C - 1] / (2 pi^2 n) reached for d -> infinity.
pub fn plateau_estimate(n: ModeIndex) -> f64 {
    let nf = n.f();
    ((2.0 * PI * nf).ln() + EULER_GAMMA - 1.0) / (2.0 * PI * PI * nf)
}

/// Leading-logarithm estimate sin^2(pi n d^(theta-1)) ln(n d) / (pi^2 n).
pub fn leading_log_estimate(n: ModeIndex, d: f64, theta: f64) -> f64 {
    let nf = n.f();
    let s = (PI * nf * d.powf(theta - 1.0)).sin();
    s * s * (nf * d).ln() / (PI * PI * nf)
}

/// Predicted maxima theta = 1 + log_d((j + 1/2)/n), j = 0..n-1, restricted
/// to [0, 1) and sorted ascending.
pub fn maxima_positions(n: ModeIndex, d: f64) -> Result<Vec<f64>> {
    if !(d.is_finite() && d > 1.0) {
        return Err(Error::OutOfDomain { what: "d", value: d, lo: 1.0, hi: f64::INFINITY });
    }
    let nf = n.f();
    let ln_d = d.ln();
    let mut out: Vec<f64> = (0..n.get())
        .map(|j| 1.0 + ((j as f64 + 0.5) / nf).ln() / ln_d)
        .filter(|t| (0.0..1.0).contains(t))
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximumSearch {
    pub theta: f64,
    pub value: f64,
    pub tail_bound: f64,
    /// The coarse grid showed more than one significant local maximum; the
    /// result refines the highest one.
    pub multimodal: bool,
}

/// Points on the coarse grid that bracket the maximum.
pub const SEARCH_GRID: usize = 64;
/// Peaks lower than this fraction of the highest one are not counted.
pub const PROMINENCE_FRACTION: f64 = 0.1;

/// Number of local maxima whose prominence is at least `fraction` of the
/// largest value. A run of equal values counts once; of two equal peaks the
/// left one is treated as the higher.
pub fn count_local_maxima(values: &[f64], fraction: f64) -> usize {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return 0;
    }
    let threshold = fraction * top;
    let len = values.len();
    let mut count = 0;
    let mut i = 0;
    while i < len {
        let mut j = i;
        while j + 1 < len && values[j + 1] == values[i] {
            j += 1;
        }
        let peak = values[i];
        let is_peak = (i == 0 || values[i - 1] < peak) && (j + 1 == len || values[j + 1] < peak);
        if is_peak {
            // Minimum on each side, up to the nearest higher point or the edge.
            let left = (i > 0).then(|| {
                values[..i]
                    .iter()
                    .rev()
                    .take_while(|&&x| x < peak)
                    .copied()
                    .fold(peak, f64::min)
            });
            let right = (j + 1 < len).then(|| {
                values[j + 1..]
                    .iter()
                    .take_while(|&&x| x <= peak)
                    .copied()
                    .fold(peak, f64::min)
            });
            let prominence = match (left, right) {
                (Some(a), Some(b)) => peak - a.max(b),
                (Some(a), None) => peak - a,
                (None, Some(b)) => peak - b,
                (None, None) => f64::INFINITY,
            };
            if prominence >= threshold {
                count += 1;
            }
        }
        i = j + 1;
    }
    count
}

/// Maximizes N_n over theta in `bracket`: a coarse grid locates the best
/// cell, golden-section search refines it to `theta_tol`.
pub fn exact_maximum_search(n: ModeIndex, d: f64, bracket: (f64, f64), theta_tol: f64) -> Result<MaximumSearch> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi < 1.0 && lo < hi) {
        return Err(Error::InvalidParameter(format!("bracket ({lo}, {hi}) must lie inside (0, 1)")));
    }
    check_doppler_theta(d, lo)?;
    let eval_tol = 1e-9;
    let f = |t: f64| mean_particle_number(n, d, t, eval_tol);
    let step = (hi - lo) / (SEARCH_GRID - 1) as f64;
    let grid: Vec<f64> = (0..SEARCH_GRID).map(|i| lo + step * i as f64).collect();
    let values = grid
        .par_iter()
        .map(|&t| f(t).map(|r| r.value))
        .collect::<Result<Vec<f64>>>()?;
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    let multimodal = count_local_maxima(&values, PROMINENCE_FRACTION) > 1;
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(SEARCH_GRID - 1)];
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = f(x1)?.value;
    let mut f2 = f(x2)?.value;
    while b - a > theta_tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2)?.value;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1)?.value;
        }
    }
    let mut theta = 0.5 * (a + b);
    let mut at = f(theta)?;
    if values[best] > at.value {
        theta = grid[best];
        at = f(theta)?;
    }
    Ok(MaximumSearch { theta, value: at.value, tail_bound: at.tail_bound, multimodal })
}

/// Squeeze rates rho_k = d^(-k) at which no particles are created.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroPosition {
    pub k: u32,
    pub rho: f64,
    /// Always true: the phase is set to zero exactly, not through logarithms.
    pub exact_zero_phase: bool,
}

pub fn zero_positions(d: f64, k_max: u32) -> Result<Vec<ZeroPosition>> {
    if !(d.is_finite() && d > 1.0) {
        return Err(Error::OutOfDomain { what: "d", value: d, lo: 1.0, hi: f64::INFINITY });
    }
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be >= 1".into()));
    }
    Ok((1..=k_max)
        .map(|k| ZeroPosition { k, rho: d.powi(-(k as i32)), exact_zero_phase: true })
        .collect())
}

/// Where the two particle clusters sit when the wall stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterKinematics {
    /// Collisions of the first cluster with the moving wall.
    pub k: u32,
    /// Position l_i / d^k of the last such collision.
    pub x_k: f64,
    /// Time (l_i / v)(1 - d^-k) of the last such collision.
    pub t_k: f64,
    /// Separation of the two clusters at the end of the contraction.
    pub delta: f64,
    /// n delta / (2 l_f).
    pub ratio: f64,
    /// Interference order: the nearest integer for destructive, the
    /// integer part for constructive.
    pub j: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Interference {
    Constructive,
    Destructive,
    Neither,
}

/// Tolerance on n delta / (2 l_f) used by [`cluster_interference`].
pub const INTERFERENCE_TOL: f64 = 0.1;

pub fn cluster_interference(p: &CavityParams, n: ModeIndex, tol: f64) -> (ClusterKinematics, Interference) {
    let k = p.periods().floor();
    let d_k = p.d().powf(k);
    let x_k = p.l_i() / d_k;
    let t_k = (p.l_i() / p.v()) * (1.0 - 1.0 / d_k);
    let remaining = p.duration() - t_k;
    let delta = if remaining > x_k {
        p.l_f() + (x_k - remaining)
    } else {
        p.l_f() - (x_k - remaining)
    };
    let ratio = n.f() * delta / (2.0 * p.l_f());
    let nearest = ratio.round();
    let (class, j) = if (ratio - nearest).abs() < tol {
        (Interference::Destructive, nearest.max(0.0) as u32)
    } else {
        let j = ratio.floor().max(0.0);
        if (ratio - j - 0.5).abs() < tol && 2.0 * j + 1.0 <= n.f() {
            (Interference::Constructive, j as u32)
        } else {
            (Interference::Neither, j as u32)
        }
    };
    (ClusterKinematics { k: k as u32, x_k, t_k, delta, ratio, j }, class)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub theta: f64,
    pub n: usize,
    pub value: f64,
    pub tail_bound: f64,
}

/// N_n over a theta grid for each listed mode; rows ordered by theta, then
/// by the position of n in `modes`.
pub fn scan_theta(modes: &[ModeIndex], d: f64, grid: &[f64], tol: f64) -> Result<Vec<ScanRow>> {
    let cells: Vec<(f64, ModeIndex)> = grid.iter().flat_map(|&t| modes.iter().map(move |&n| (t, n))).collect();
    cells
        .par_iter()
        .map(|&(theta, n)| {
            let r = mean_particle_number(n, d, theta, tol)?;
            Ok(ScanRow { theta, n: n.get(), value: r.value, tail_bound: r.tail_bound })
        })
        .collect()
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| start + step * i as f64).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: usize) -> ModeIndex {
        ModeIndex::new(n).unwrap()
    }

    #[test]
    fn zero_phase_is_exactly_zero() {
        let r = mean_particle_number(idx(3), 4.0, 0.0, 1e-12).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.tail_bound, 0.0);
    }

    #[test]
    fn plateau_values() {
        assert!((plateau_estimate(idx(1)) - 7.17e-2).abs() < 5e-5);
        assert!((plateau_estimate(idx(2)) - 5.34e-2).abs() < 5e-5);
        assert!(plateau_estimate(idx(4)) < plateau_estimate(idx(2)));
    }

    #[test]
    fn predicted_maxima() {
        let d = (2.0 + 3f64.sqrt()).powi(2);
        let m = maxima_positions(idx(1), d).unwrap();
        assert_eq!(m.len(), 1);
        assert!((m[0] - 0.7368).abs() < 1e-4);
        assert_eq!(maxima_positions(idx(2), 1e6).unwrap().len(), 2);
    }

    #[test]
    fn leading_log_vanishes_on_integers() {
        // n d^(theta-1) = 1 at theta = 1 - ln 2 / ln d for n = 2.
        let d: f64 = 100.0;
        let theta = 1.0 - 2f64.ln() / d.ln();
        assert!(leading_log_estimate(idx(2), d, theta) < 1e-28);
    }

    #[test]
    fn local_maxima_counting() {
        assert_eq!(count_local_maxima(&[0.0, 1.0, 0.0, 2.0, 0.0], 0.1), 2);
        assert_eq!(count_local_maxima(&[0.0, 1.0, 0.95, 1.0, 0.0], 0.1), 1);
        assert_eq!(count_local_maxima(&[0.0, 1.0, 1.0, 0.5], 0.1), 1);
        assert_eq!(count_local_maxima(&[3.0, 2.0, 1.0], 0.1), 1);
    }

    #[test]
    fn zeros_exclude_the_stationary_case() {
        let z = zero_positions(4.0, 3).unwrap();
        assert_eq!(z[0].k, 1);
        assert_eq!(z[0].rho, 0.25);
        assert!(zero_positions(4.0, 0).is_err());
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(linear_grid(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(linear_grid(0.0, 1.0, 0).is_empty());
    }
}
