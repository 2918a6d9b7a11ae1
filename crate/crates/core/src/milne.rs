//! Exact mode functions of the contracting cavity.
//!
//! Psi_n(x, t) = (-i / (2 sqrt(pi n))) [z_-^{i mu} - z_+^{i mu}] with
//! z_(-/+) = 1 - v (t -/+ x) / l_i and mu = 2 pi n / ln d. Both z stay
//! positive inside the cavity strip, so z^{i mu} = exp(i mu ln z) has no
//! branch ambiguity.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::cavity::{CavityParams, ModeIndex};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilneMode {
    pub n: ModeIndex,
    pub params: CavityParams,
}

impl MilneMode {
    pub fn new(n: ModeIndex, params: CavityParams) -> Self {
        Self { n, params }
    }

    fn mu(&self) -> f64 {
        2.0 * PI * self.n.get() as f64 / self.params.ln_d()
    }

    fn norm(&self) -> Complex64 {
        Complex64::new(0.0, -1.0 / (2.0 * (PI * self.n.get() as f64).sqrt()))
    }

    fn branches(&self, x: f64, t: f64) -> (f64, f64) {
        let p = &self.params;
        (1.0 - p.v() * (t - x) / p.l_i(), 1.0 - p.v() * (t + x) / p.l_i())
    }

    fn check(&self, x: f64, t: f64) -> Result<()> {
        let p = &self.params;
        if !(t.is_finite() && (0.0..=p.duration()).contains(&t)) {
            return Err(Error::OutOfDomain { what: "t", value: t, lo: 0.0, hi: p.duration() });
        }
        let l = p.length_at(t);
        if !(x.is_finite() && (0.0..=l).contains(&x)) {
            return Err(Error::OutOfDomain { what: "x", value: x, lo: 0.0, hi: l });
        }
        Ok(())
    }

    /// Mode value with z^{i mu} = exp(i mu ln z).
    pub fn value(&self, x: f64, t: f64) -> Result<Complex64> {
        self.check(x, t)?;
        Ok(self.value_unchecked(x, t))
    }

    fn value_unchecked(&self, x: f64, t: f64) -> Complex64 {
        let (zm, zp) = self.branches(x, t);
        let mu = self.mu();
        self.norm() * (Complex64::from_polar(1.0, mu * zm.ln()) - Complex64::from_polar(1.0, mu * zp.ln()))
    }

    /// Same value through the general complex power z^w with w = i mu.
    pub fn value_by_complex_power(&self, x: f64, t: f64) -> Result<Complex64> {
        self.check(x, t)?;
        let (zm, zp) = self.branches(x, t);
        let w = Complex64::new(0.0, self.mu());
        Ok(self.norm() * (Complex64::new(zm, 0.0).powc(w) - Complex64::new(zp, 0.0).powc(w)))
    }

    /// Analytic time derivative: d/dt z^{i mu} = -i mu (v / l_i) z^{i mu} / z.
    pub fn time_derivative(&self, x: f64, t: f64) -> Result<Complex64> {
        self.check(x, t)?;
        Ok(self.time_derivative_unchecked(x, t))
    }

    fn time_derivative_unchecked(&self, x: f64, t: f64) -> Complex64 {
        let (zm, zp) = self.branches(x, t);
        let mu = self.mu();
        let factor = Complex64::new(0.0, -mu * self.params.v() / self.params.l_i());
        let term = |z: f64| Complex64::from_polar(1.0 / z, mu * z.ln());
        self.norm() * factor * (term(zm) - term(zp))
    }
}

pub fn milne_mode_value(m: &MilneMode, x: f64, t: f64) -> Result<Complex64> {
    m.value(x, t)
}

/// i int_0^{l(t)} [conj(Psi_1) d_t Psi_2 - conj(d_t Psi_1) Psi_2] dx with
/// its quadrature error estimate.
pub fn kg_inner_product(m1: &MilneMode, m2: &MilneMode, t: f64, quad: &QuadratureConfig) -> Result<(Complex64, f64)> {
    if m1.params != m2.params {
        return Err(Error::InvalidParameter("modes belong to different cavities".into()));
    }
    let p = &m1.params;
    m1.check(0.0, t)?;
    let l = p.length_at(t);
    // The phases mu ln z vary fastest near the moving wall, where
    // z_+ = (1 - v) l(t) / l_i; size panels by the largest phase slope.
    let slope = (m1.mu() + m2.mu()) * p.v() / ((1.0 - p.v()) * l);
    let panels = if quad.oscillation_split { ((slope * l / PI).ceil() as usize).max(1) } else { 1 };
    let breakpoints: Vec<f64> = (0..=panels).map(|i| l * i as f64 / panels as f64).collect();
    let integrand = |x: f64| {
        let x = x.clamp(0.0, l);
        let a = m1.value_unchecked(x, t);
        let b = m2.value_unchecked(x, t);
        let da = m1.time_derivative_unchecked(x, t);
        let db = m2.time_derivative_unchecked(x, t);
        Complex64::new(0.0, 1.0) * (a.conj() * db - da.conj() * b)
    };
    let r = integrate(integrand, &breakpoints, quad);
    if !r.converged {
        return Err(Error::QuadratureBudget {
            context: format!("Klein-Gordon product ({}, {}) at t = {t}", m1.n.get(), m2.n.get()),
            best: r.value,
            error: r.error,
        });
    }
    Ok((r.value, r.error))
}

/// Klein–Gordon products of the first `count` modes at time t.
pub fn gram_matrix(p: &CavityParams, count: usize, t: f64, quad: &QuadratureConfig) -> Result<DMatrix<Complex64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("need at least one mode".into()));
    }
    let cells = (0..count * count)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % count + 1, idx / count + 1);
            let a = MilneMode::new(ModeIndex::new(i)?, *p);
            let b = MilneMode::new(ModeIndex::new(j)?, *p);
            kg_inner_product(&a, &b, t, quad).map(|r| r.0).map_err(|e| e.at(i, j))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_vec(count, count, cells))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::{Speed, Squeeze};

    fn params() -> CavityParams {
        CavityParams::new(Speed::Velocity(0.6), Squeeze::Rho(0.3)).unwrap()
    }

    #[test]
    fn vanishes_on_both_walls() {
        let p = params();
        for n in 1..=5 {
            let m = MilneMode::new(ModeIndex::new(n).unwrap(), p);
            for i in 0..50 {
                let t = p.duration() * i as f64 / 49.0;
                assert!(m.value(0.0, t).unwrap().norm() < 1e-15);
                assert!(m.value(p.length_at(t), t).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_points_outside_the_strip() {
        let p = params();
        let m = MilneMode::new(ModeIndex::new(1).unwrap(), p);
        assert!(m.value(-0.1, 0.0).is_err());
        assert!(m.value(0.5, p.duration() + 0.1).is_err());
        assert!(m.value(p.length_at(0.5) + 1e-6, 0.5).is_err());
    }

    #[test]
    fn two_power_routes_agree() {
        let p = params();
        let m = MilneMode::new(ModeIndex::new(1).unwrap(), p);
        let a = m.value(0.5, 0.0).unwrap();
        let b = m.value_by_complex_power(0.5, 0.0).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn analytic_derivative_matches_finite_difference() {
        let p = params();
        let m = MilneMode::new(ModeIndex::new(3).unwrap(), p);
        let (x, t, h) = (0.2, 0.4, 1e-5);
        let fd = (m.value(x, t + h).unwrap() - m.value(x, t - h).unwrap()) / (2.0 * h);
        assert!((fd - m.time_derivative(x, t).unwrap()).norm() < 1e-7);
    }
}
