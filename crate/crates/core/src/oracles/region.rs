//! Geometry of the pre-summed pair-creation integral and its exact
//! evaluation over the two regions bounded by the kernel's jump lines.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::cavity::ModeIndex;
use crate::error::Result;
use crate::transform::check_doppler_theta;

/// Jump lines of the sawtooth kernel on the square [-1, 1]^2.
///
/// Z = -theta + ln((1 - v y1)/(1 - v y2)) / ln d crosses 0 on the line
/// y2 = b(y1) and -1 on y2 = c(y1); `a` is where b meets the top edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub d: f64,
    pub theta: f64,
    pub v: f64,
    pub a: f64,
    /// d^(-theta)
    pub b_slope: f64,
    pub b_intercept: f64,
    /// d^(1 - theta)
    pub c_slope: f64,
    pub c_intercept: f64,
    ln_d: f64,
}

impl RegionSpec {
    pub fn new(d: f64, theta: f64) -> Result<Self> {
        check_doppler_theta(d, theta)?;
        let v = (d - 1.0) / (d + 1.0);
        let q = d.powf(theta);
        let b_slope = 1.0 / q;
        let c_slope = d / q;
        Ok(Self {
            d,
            theta,
            v,
            a: 1.0 - 2.0 * (q - 1.0) / (d - 1.0),
            b_slope,
            b_intercept: (1.0 - b_slope) / v,
            c_slope,
            c_intercept: (1.0 - c_slope) / v,
            ln_d: d.ln(),
        })
    }

    pub fn b(&self, y1: f64) -> f64 {
        self.b_intercept + self.b_slope * y1
    }

    pub fn c(&self, y1: f64) -> f64 {
        self.c_intercept + self.c_slope * y1
    }

    pub fn z(&self, y1: f64, y2: f64) -> f64 {
        -self.theta + ((-self.v * y1).ln_1p() - (-self.v * y2).ln_1p()) / self.ln_d
    }
}

/// theta(Z) + theta(-Z) theta(Z+1) + theta(-Z-1) theta(Z+2), with theta the
/// unit step (value 1 for positive argument, 0 otherwise).
pub fn region_partition(z: f64) -> f64 {
    let step = |x: f64| if x > 0.0 { 1.0 } else { 0.0 };
    step(z) + step(-z) * step(z + 1.0) + step(-z - 1.0) * step(z + 2.0)
}

/// int_{x0}^{x1} e^{i pi k y} dy in a form that stays accurate as k (x1 - x0) -> 0.
fn exp_integral(k: f64, x0: f64, x1: f64) -> Complex64 {
    let w = x1 - x0;
    let half = 0.5 * PI * k * w;
    let sinc = if half.abs() < 1e-4 {
        1.0 - half * half / 6.0
    } else {
        half.sin() / half
    };
    Complex64::from_polar(w * sinc, PI * k * 0.5 * (x0 + x1))
}

fn cis_pi(x: f64) -> Complex64 {
    // e^{i pi x}, reduced modulo 2 first.
    let r = x - 2.0 * (x / 2.0).round();
    Complex64::from_polar(1.0, PI * r)
}

/// Pair-creation amplitude from the two regions of the jump-line geometry,
/// with both integrations done in closed form.
pub fn v_region_integration(n: ModeIndex, n2: ModeIndex, d: f64, theta: f64) -> Result<Complex64> {
    let r = RegionSpec::new(d, theta)?;
    let (nf, mf) = (n.get() as f64, n2.get() as f64);
    let inner = Complex64::new(0.0, PI * mf);
    // Upper-left region: y1 in [-1, a], y2 in [b(y1), 1].
    let upper = (cis_pi(mf) * exp_integral(nf, -1.0, r.a)
        - cis_pi(mf * r.b_intercept) * exp_integral(nf + mf * r.b_slope, -1.0, r.a))
        / inner;
    // Lower-right region: y1 in [a, 1], y2 in [-1, c(y1)].
    let lower = (cis_pi(mf * r.c_intercept) * exp_integral(nf + mf * r.c_slope, r.a, 1.0)
        - cis_pi(-mf) * exp_integral(nf, r.a, 1.0))
        / inner;
    let pre = Complex64::new(0.0, 0.5 * PI * (nf * mf).sqrt());
    Ok(pre * (upper - lower))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jump_lines_meet_the_square_at_a() {
        let r = RegionSpec::new(4.0, 0.3).unwrap();
        assert!((r.b(r.a) - 1.0).abs() < 1e-14);
        assert!((r.c(r.a) + 1.0).abs() < 1e-14);
        assert!(r.z(r.a, r.b(r.a)).abs() < 1e-14);
    }

    #[test]
    fn zero_phase_vanishes() {
        let one = ModeIndex::new(1).unwrap();
        let three = ModeIndex::new(3).unwrap();
        assert!(v_region_integration(one, three, 4.0, 0.0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn small_argument_integral() {
        let z = exp_integral(1e-9, -1.0, 1.0);
        assert!((z - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let exact = (Complex64::from_polar(1.0, PI * 3.0 * 0.4) - Complex64::from_polar(1.0, -PI * 3.0)) / Complex64::new(0.0, 3.0 * PI);
        assert!((exp_integral(3.0, -1.0, 0.4) - exact).norm() < 1e-15);
    }
}
