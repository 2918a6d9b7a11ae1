//! Time-independent Bogoliubov coefficients between the instantaneous
//! cavity modes and the stable quasiparticles, the quadratic generator of
//! chi-translations, and the nonadiabatic coupling matrices.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::cavity::{derived_mode, speed_parts, CavityParams, ModeIndex, Speed};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Pair, QuadratureConfig};

/// Largest truncation accepted by the dense matrix builders.
pub const MAX_TRUNCATION: usize = 512;

const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn check_truncation(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter("truncation must be >= 1".into()))
    } else if n > MAX_TRUNCATION {
        Err(Error::TruncationLimit { requested: n, limit: MAX_TRUNCATION })
    } else {
        Ok(())
    }
}

/// Rectangular blocks may be tall as long as they hold no more entries
/// than the largest square matrix.
pub(crate) fn check_block(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("block dimensions must be >= 1".into()));
    }
    let requested = rows.max(cols);
    if rows.saturating_mul(cols) > MAX_TRUNCATION * MAX_TRUNCATION || requested > 64 * MAX_TRUNCATION {
        return Err(Error::TruncationLimit { requested, limit: MAX_TRUNCATION });
    }
    Ok(())
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Speed plus ln d, validated once and shared by every entry.
#[derive(Debug, Clone, Copy)]
struct Boost {
    v: f64,
    gamma: f64,
    ln_d: f64,
}

impl Boost {
    fn new(v: f64) -> Result<Self> {
        let (v, gamma, _, ln_d) = speed_parts(Speed::Velocity(v))?;
        Ok(Self { v, gamma, ln_d })
    }

    /// Frequency 2 pi n / ln d of the power-law phase.
    fn mu(&self, n: usize) -> f64 {
        2.0 * PI * n as f64 / self.ln_d
    }
}

/// Abscissae in (-1, 1) where either phase of the integrand advances by a half period.
fn half_period_points(b: &Boost, n: usize, n2: usize) -> Vec<f64> {
    let mut pts = Vec::with_capacity(2 * (n + n2) + 1);
    pts.push(-1.0);
    // -mu ln(1 - v y) rises by 2 pi n over [-1, 1]; it crosses k pi above its
    // start at y = (1 - (1 + v) e^{-k pi / mu}) / v.
    let mu = b.mu(n);
    for k in 1..2 * n {
        let s = k as f64 * PI / mu;
        let y = (-(-s).exp_m1() - b.v * (-s).exp()) / b.v;
        pts.push(y);
    }
    for k in 1..2 * n2 {
        pts.push(-1.0 + k as f64 / n2 as f64);
    }
    pts.push(1.0);
    pts.retain(|y| (-1.0..=1.0).contains(y));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    pts
}

fn alpha_beta_raw(b: &Boost, n: usize, n2: usize, quad: &QuadratureConfig) -> Result<(Complex64, Complex64, f64)> {
    let mu = b.mu(n);
    let k = PI * n2 as f64;
    let v = b.v;
    let integrand = |y: f64| {
        let power = -mu * (-v * y).ln_1p();
        Pair(Complex64::from_polar(1.0, power - k * y), Complex64::from_polar(1.0, power + k * y))
    };
    let breakpoints = if quad.oscillation_split {
        half_period_points(b, n, n2)
    } else {
        vec![-1.0, 1.0]
    };
    let r = integrate(integrand, &breakpoints, quad);
    let scale = 0.5 * (n2 as f64 / n as f64).sqrt();
    if !r.converged {
        return Err(Error::QuadratureBudget {
            context: format!("alpha/beta ({n}, {n2}) at v = {v}"),
            best: r.value.0 * scale,
            error: r.error * scale,
        });
    }
    Ok((r.value.0 * scale, r.value.1 * scale, r.error * scale))
}

/// Forward and backward coefficients for one mode pair, each accurate to
/// the returned error estimate.
pub fn alpha_beta(n: ModeIndex, n2: ModeIndex, v: f64, quad: &QuadratureConfig) -> Result<(Complex64, Complex64, f64)> {
    alpha_beta_raw(&Boost::new(v)?, n.get(), n2.get(), quad)
}

/// IBP envelope for |alpha_{nm}| and |beta_{nm}|: half the prefactor times
/// twice the inverse of the smallest phase slope, capped by the trivial bound.
pub fn coefficient_envelope(n: usize, m: usize, v: f64) -> Result<(f64, f64)> {
    let b = Boost::new(v)?;
    Ok(envelope(&b, n, m))
}

fn envelope(b: &Boost, n: usize, m: usize) -> (f64, f64) {
    let pre = (m as f64 / n as f64).sqrt();
    let mu = b.mu(n);
    let lo = mu * b.v / (1.0 + b.v);
    let hi = mu * b.v / (1.0 - b.v);
    let km = PI * m as f64;
    let slope_alpha = if km > hi {
        km - hi
    } else if lo > km {
        lo - km
    } else {
        0.0
    };
    let alpha = if slope_alpha > 0.0 { (pre / slope_alpha).min(pre) } else { pre };
    let beta = (pre / (lo + km)).min(pre);
    (alpha, beta)
}

/// Coefficient blocks alpha_{nm}, beta_{nm} for 1 <= n <= rows, 1 <= m <= cols.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovMatrices {
    pub alpha: DMatrix<Complex64>,
    pub beta: DMatrix<Complex64>,
    pub err: DMatrix<f64>,
    pub v: f64,
}

/// Residuals of the two unitarity relations over the leading index block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityCheck {
    /// max |sum(alpha alpha* - beta beta*) - delta|.
    pub normalization: f64,
    /// max |sum(alpha beta - beta alpha)|, the antisymmetric relation.
    pub symplectic: f64,
    /// Largest contribution of the last half of the summed columns; a
    /// proxy for the size of the neglected tail.
    pub tail_estimate: f64,
    pub indices: usize,
    pub truncation: usize,
}

impl BogoliubovMatrices {
    pub fn rows(&self) -> usize {
        self.alpha.nrows()
    }

    pub fn truncation(&self) -> usize {
        self.alpha.ncols()
    }

    pub fn max_error(&self) -> f64 {
        self.err.iter().copied().fold(0.0, f64::max)
    }

    /// Unitarity residuals for row indices 1..=indices, summing over every stored column.
    pub fn unitarity(&self, indices: usize) -> UnitarityCheck {
        unitarity_residuals(&self.alpha, &self.beta, indices)
    }
}

/// Residuals of sum_m (a_{nm} a*_{n'm} - b_{nm} b*_{n'm}) = delta and
/// sum_m (a_{nm} b_{n'm} - b_{nm} a_{n'm}) = 0 over rows 1..=indices.
pub(crate) fn unitarity_residuals(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, indices: usize) -> UnitarityCheck {
    let k = indices.min(a.nrows());
    let cols = a.ncols();
    let half = cols / 2;
    let mut normalization: f64 = 0.0;
    let mut symplectic: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for n in 0..k {
        for n2 in 0..k {
            let mut norm = Complex64::new(0.0, 0.0);
            let mut symp = Complex64::new(0.0, 0.0);
            let mut norm_tail = Complex64::new(0.0, 0.0);
            let mut symp_tail = Complex64::new(0.0, 0.0);
            for m in 0..cols {
                let x = a[(n, m)] * a[(n2, m)].conj() - b[(n, m)] * b[(n2, m)].conj();
                let y = a[(n, m)] * b[(n2, m)] - b[(n, m)] * a[(n2, m)];
                norm += x;
                symp += y;
                if m >= half {
                    norm_tail += x;
                    symp_tail += y;
                }
            }
            let delta = if n == n2 { 1.0 } else { 0.0 };
            normalization = normalization.max((norm - delta).norm());
            symplectic = symplectic.max(symp.norm());
            tail = tail.max(norm_tail.norm()).max(symp_tail.norm());
        }
    }
    UnitarityCheck {
        normalization,
        symplectic,
        tail_estimate: tail,
        indices: k,
        truncation: cols,
    }
}

/// Square N x N coefficient matrices.
pub fn bogoliubov_matrices(v: f64, truncation: usize, quad: &QuadratureConfig) -> Result<BogoliubovMatrices> {
    bogoliubov_block(v, truncation, truncation, quad)
}

/// Rectangular block with `rows` quasiparticle indices and `cols` cavity modes.
pub fn bogoliubov_block(v: f64, rows: usize, cols: usize, quad: &QuadratureConfig) -> Result<BogoliubovMatrices> {
    check_block(rows, cols)?;
    let b = Boost::new(v)?;
    let entries: Vec<(Complex64, Complex64, f64)> = (0..rows * cols)
        .into_par_iter()
        .map(|idx| {
            let (n, m) = (idx % rows + 1, idx / rows + 1);
            alpha_beta_raw(&b, n, m, quad).map_err(|e| e.at(n, m))
        })
        .collect::<Result<_>>()?;
    Ok(BogoliubovMatrices {
        alpha: DMatrix::from_iterator(rows, cols, entries.iter().map(|e| e.0)),
        beta: DMatrix::from_iterator(rows, cols, entries.iter().map(|e| e.1)),
        err: DMatrix::from_iterator(rows, cols, entries.iter().map(|e| e.2)),
        v: b.v,
    })
}

/// Matrices of the generator
/// Lambda = sum h_{nm} a+_n a_m + (1/2) sum (g_{nm} a+_n a+_m + g*_{nm} a_n a_m).
///
/// h is Hermitian with diagonal n; g is symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrices {
    pub h: DMatrix<Complex64>,
    pub g: DMatrix<Complex64>,
    pub v: f64,
}

pub fn generator_matrices(v: f64, truncation: usize) -> Result<GeneratorMatrices> {
    check_truncation(truncation)?;
    generator_any_size(v, truncation)
}

/// The evolution oracle works in bases larger than the dense-matrix limit.
pub(crate) fn generator_any_size(v: f64, truncation: usize) -> Result<GeneratorMatrices> {
    let b = Boost::new(v)?;
    let coupling = |n: usize, m: usize| sign(n + m) * ((n * m) as f64).sqrt() * b.v / PI;
    let h = DMatrix::from_fn(truncation, truncation, |i, j| {
        let (n, m) = (i + 1, j + 1);
        if n == m {
            Complex64::new(n as f64, 0.0)
        } else {
            -I * coupling(n, m) / (m as f64 - n as f64)
        }
    });
    let g = DMatrix::from_fn(truncation, truncation, |i, j| {
        let (n, m) = (i + 1, j + 1);
        I * coupling(n, m) / (n + m) as f64
    });
    Ok(GeneratorMatrices { h, g, v: b.v })
}

impl GeneratorMatrices {
    pub fn truncation(&self) -> usize {
        self.h.nrows()
    }

    /// Largest deviation from [Lambda, b_n] = -lambda_n b_n for quasiparticle
    /// rows 1..=rows and mode columns 1..=cols, with the mode sums truncated
    /// at the generator's size.
    pub fn eigen_residual(&self, coeffs: &BogoliubovMatrices, rows: usize, cols: usize) -> Result<f64> {
        let n_modes = self.truncation();
        if coeffs.truncation() != n_modes || coeffs.rows() < rows || cols > n_modes {
            return Err(Error::InvalidParameter(format!(
                "coefficient block {}x{} does not match generator truncation {n_modes}",
                coeffs.rows(),
                coeffs.truncation()
            )));
        }
        let b = Boost::new(self.v)?;
        let alpha = coeffs.alpha.rows(0, rows);
        let beta = coeffs.beta.rows(0, rows);
        let left_a = alpha * &self.h - beta * self.g.map(|z| z.conj());
        let left_b = alpha * &self.g - beta * self.h.map(|z| z.conj());
        let mut worst: f64 = 0.0;
        for n in 0..rows {
            let lambda = 2.0 * b.v * (n + 1) as f64 / b.ln_d;
            for m in 0..cols {
                worst = worst
                    .max((left_a[(n, m)] - alpha[(n, m)] * lambda).norm())
                    .max((left_b[(n, m)] - beta[(n, m)] * lambda).norm());
            }
        }
        Ok(worst)
    }
}

/// Coefficient matrices of the nonstationary part of the Hamiltonian in the
/// quasiparticle basis. `scattering` is anti-Hermitian and `pairing` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    pub scattering: DMatrix<Complex64>,
    pub pairing: DMatrix<Complex64>,
    pub v: f64,
}

pub fn nonadiabatic_couplings(v: f64, truncation: usize) -> Result<CouplingMatrices> {
    check_truncation(truncation)?;
    let b = Boost::new(v)?;
    let l = b.ln_d;
    let ln_gamma = b.gamma.ln();
    let g2 = b.gamma * b.gamma;
    // gamma^(2 + 2 pi i k / L)
    let gamma_power = |k: f64| Complex64::from_polar(g2, 2.0 * PI * k * ln_gamma / l);
    let diagonal = l / b.v + 2.0 * g2 * (ln_gamma - 1.0);
    let scattering = DMatrix::from_fn(truncation, truncation, |i, j| {
        let (n, m) = (i + 1, j + 1);
        if n == m {
            -I * (2.0 * PI * n as f64 / (l * l)) * diagonal
        } else {
            let k = m as f64 - n as f64;
            let root = ((n * m) as f64).sqrt();
            I * (sign(n + m) * root / PI) * gamma_power(-k) / (k * Complex64::new(k, l / (2.0 * PI)))
        }
    });
    let pairing = DMatrix::from_fn(truncation, truncation, |i, j| {
        let (n, m) = (i + 1, j + 1);
        let k = (n + m) as f64;
        let root = ((n * m) as f64).sqrt();
        I * (sign(n + m) * root / PI) * gamma_power(k) / (k * Complex64::new(k, -l / (2.0 * PI)))
    });
    Ok(CouplingMatrices { scattering, pairing, v: b.v })
}

/// Energy pi lambda_n / l(t) of the n-th stable quasiparticle.
pub fn stable_particle_energy(p: &CavityParams, n: ModeIndex, t: f64) -> Result<f64> {
    Ok(derived_mode(p, n, t)?.stable_energy)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: usize) -> ModeIndex {
        ModeIndex::new(n).unwrap()
    }

    #[test]
    fn static_limit() {
        let q = QuadratureConfig::default();
        for (n, m) in [(1, 1), (1, 2), (3, 3), (2, 5)] {
            let (a, b, _) = alpha_beta(idx(n), idx(m), 1e-8, &q).unwrap();
            let delta = if n == m { 1.0 } else { 0.0 };
            assert!((a - delta).norm() < 1e-6, "alpha({n},{m}) = {a}");
            assert!(b.norm() < 1e-6, "beta({n},{m}) = {b}");
        }
    }

    #[test]
    fn breakpoints_are_sorted_and_inside() {
        let b = Boost::new(0.9).unwrap();
        let pts = half_period_points(&b, 7, 3);
        assert_eq!(pts[0], -1.0);
        assert_eq!(*pts.last().unwrap(), 1.0);
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn generator_static_limit_and_structure() {
        let g = generator_matrices(1e-10, 4).unwrap();
        for n in 0..4 {
            assert!((g.h[(n, n)].re - (n + 1) as f64).abs() < 1e-15);
        }
        assert!(g.g.iter().all(|z| z.norm() < 1e-10));
        let g = generator_matrices(0.5, 6).unwrap();
        assert!((&g.h - g.h.adjoint()).iter().all(|z| z.norm() < 1e-15));
        assert!((&g.g - g.g.transpose()).iter().all(|z| z.norm() < 1e-15));
        // cross term between modes 1 and 2 carries (-1)^3 sqrt(2)
        let expected = -I * (-(2f64.sqrt()) * 0.5 / PI);
        assert!((g.h[(0, 1)] - expected).norm() < 1e-15);
    }

    #[test]
    fn coupling_symmetries() {
        for v in [0.1, 0.5, 0.9] {
            let c = nonadiabatic_couplings(v, 16).unwrap();
            let s = &c.scattering;
            assert!((s.map(|z| z.conj()) + s.transpose()).iter().all(|z| z.norm() < 1e-14 * s.norm().max(1.0)));
            assert!((&c.pairing - c.pairing.transpose()).iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn truncation_limit_is_enforced() {
        assert!(matches!(
            generator_matrices(0.5, MAX_TRUNCATION + 1),
            Err(Error::TruncationLimit { .. })
        ));
        assert!(generator_matrices(0.5, 0).is_err());
    }

    #[test]
    fn budget_failure_names_the_entry() {
        let q = QuadratureConfig { max_subdivisions: 0, oscillation_split: false, ..Default::default() };
        let e = bogoliubov_block(0.9, 1, 3, &q).unwrap_err();
        assert!(matches!(e, Error::Entry { row: 1, .. }), "{e}");
    }
}
