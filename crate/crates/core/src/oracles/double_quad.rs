//! Pair-creation amplitude by direct two-dimensional quadrature of the
//! pre-summed integral: the sum over quasiparticle modes collapses to a
//! sawtooth in the region function Z, which jumps on the b and c lines.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::region::RegionSpec;
use crate::cavity::ModeIndex;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Integral, QuadratureConfig};

/// Im sum_{k >= 1} e^{2 pi i k z} / k = pi (1/2 - frac z), off the integers.
pub fn sawtooth(z: f64) -> f64 {
    PI * (0.5 - (z - z.floor()))
}

fn outer_breakpoints(r: &RegionSpec) -> Vec<f64> {
    let mut pts = vec![-1.0, 1.0];
    for (slope, intercept) in [(r.b_slope, r.b_intercept), (r.c_slope, r.c_intercept)] {
        for edge in [-1.0, 1.0] {
            pts.push((edge - intercept) / slope);
        }
    }
    clip(pts)
}

fn clip(mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|y| y.is_finite() && (-1.0..=1.0).contains(y));
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    pts
}

/// Iterated adaptive quadrature of e^{i pi (n y1 + m y2)} kernel(y1, y2) over
/// the square, splitting the inner integral at the jump lines.
fn square_integral<K>(r: &RegionSpec, n: f64, m: f64, kernel: K, quad: &QuadratureConfig) -> (Integral<Complex64>, bool)
where
    K: Fn(f64, f64) -> f64,
{
    let inner_quad = QuadratureConfig {
        rel_tol: quad.rel_tol * 0.1,
        abs_tol: quad.abs_tol * 0.1,
        ..*quad
    };
    let inner_ok = std::cell::Cell::new(true);
    let inner_err = std::cell::Cell::new(0.0f64);
    let outer = |y1: f64| {
        let cuts = clip(vec![-1.0, 1.0, r.b(y1), r.c(y1)]);
        let res = integrate(
            |y2: f64| Complex64::from_polar(kernel(y1, y2), PI * m * y2),
            &cuts,
            &inner_quad,
        );
        if !res.converged {
            inner_ok.set(false);
        }
        inner_err.set(inner_err.get().max(res.error));
        res.value * Complex64::from_polar(1.0, PI * n * y1)
    };
    let mut out = integrate(outer, &outer_breakpoints(r), quad);
    // Inner errors accumulate over an outer interval of length 2.
    out.error += 2.0 * inner_err.get();
    (out, inner_ok.get())
}

/// V_{nm} = (i sqrt(nm) / 2) iint e^{i pi (n y1 + m y2)} sawtooth(Z) d^2y,
/// with its achieved error estimate.
pub fn v_double_quadrature(n: ModeIndex, n2: ModeIndex, d: f64, theta: f64, quad: &QuadratureConfig) -> Result<(Complex64, f64)> {
    let r = RegionSpec::new(d, theta)?;
    let (nf, mf) = (n.get() as f64, n2.get() as f64);
    let (res, inner_ok) = square_integral(&r, nf, mf, |y1, y2| sawtooth(r.z(y1, y2)), quad);
    let scale = 0.5 * (nf * mf).sqrt();
    let value = Complex64::new(0.0, scale) * res.value;
    if !(res.converged && inner_ok) {
        return Err(Error::QuadratureBudget {
            context: format!("double quadrature ({}, {}) at d = {d}, theta = {theta}", n.get(), n2.get()),
            best: value,
            error: res.error * scale,
        });
    }
    Ok((value, res.error * scale))
}

/// iint e^{i pi (n y1 + m y2)} pi (1/2 - Z) d^2y, the smooth part of the
/// kernel, which integrates to zero.
pub fn kernel_constant_term(n: ModeIndex, n2: ModeIndex, d: f64, theta: f64, quad: &QuadratureConfig) -> Result<(Complex64, f64)> {
    let r = RegionSpec::new(d, theta)?;
    let (nf, mf) = (n.get() as f64, n2.get() as f64);
    let (res, _) = square_integral(&r, nf, mf, |y1, y2| PI * (0.5 - r.z(y1, y2)), quad);
    Ok((res.value, res.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sawtooth_values() {
        assert!((sawtooth(0.25) - PI / 4.0).abs() < 1e-15);
        assert!((sawtooth(-0.75) - PI / 4.0).abs() < 1e-15);
        assert!((sawtooth(0.5)).abs() < 1e-15);
    }

    #[test]
    fn sawtooth_matches_partial_fourier_sum() {
        let z: f64 = 0.3;
        let s: f64 = (1..200_000).map(|k| (2.0 * PI * k as f64 * z).sin() / k as f64).sum();
        assert!((s - sawtooth(z)).abs() < 1e-4);
    }
}
