//! Cavity kinematics: one wall fixed at x = 0, the other moving inward as
//! l(t) = l_i - v t until it reaches l_f = rho * l_i.
//!
//! The duration is taken as T = (l_i - l_f)/v, positive for a contraction,
//! which is the convention consistent with rho = 1 - vT/l_i.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const SPEED_MARGIN: f64 = 1e-12;
const THETA_SNAP: f64 = 1e-12;

/// How the wall speed is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Speed {
    Velocity(f64),
    Gamma(f64),
}

/// How the amount of contraction is given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Squeeze {
    /// rho = l_f / l_i.
    Rho(f64),
    /// rho = d^(-k); the fractional phase is exactly zero.
    RhoPower(u32),
    /// Contraction duration T in the units of l_i.
    Duration(f64),
    /// Fractional phase given directly, with rho = d^(-theta).
    /// theta = 0 selects the first full period, rho = 1/d.
    Theta(f64),
}

/// Mode number n >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex(usize);

impl ModeIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            Err(Error::InvalidMode(n))
        } else {
            Ok(Self(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub(crate) fn f(self) -> f64 {
        self.0 as f64
    }
}

impl TryFrom<usize> for ModeIndex {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

/// Validated, mutually consistent cavity parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    v: f64,
    gamma: f64,
    d: f64,
    ln_d: f64,
    l_i: f64,
    l_f: f64,
    rho: f64,
    duration: f64,
    periods: f64,
    theta: f64,
}

/// Doppler factor, its logarithm, speed and Lorentz factor for a validated speed.
pub(crate) fn speed_parts(speed: Speed) -> Result<(f64, f64, f64, f64)> {
    match speed {
        Speed::Velocity(v) => {
            if !(v > SPEED_MARGIN && 1.0 - v > SPEED_MARGIN) {
                return Err(Error::InvalidSpeed(v));
            }
            let gamma = 1.0 / ((1.0 - v) * (1.0 + v)).sqrt();
            Ok((v, gamma, (1.0 + v) / (1.0 - v), 2.0 * v.atanh()))
        }
        Speed::Gamma(g) => {
            if !(g.is_finite() && g > 1.0) {
                return Err(Error::InvalidGamma(g));
            }
            let root = ((g - 1.0) * (g + 1.0)).sqrt();
            let v = root / g;
            if !(v > SPEED_MARGIN && 1.0 - v > SPEED_MARGIN) {
                return Err(Error::InvalidSpeed(v));
            }
            let s = g + root;
            Ok((v, g, s * s, 2.0 * g.acosh()))
        }
    }
}

impl CavityParams {
    /// Parameters with the natural length unit l_i = 1.
    pub fn new(speed: Speed, squeeze: Squeeze) -> Result<Self> {
        params_from(speed, squeeze, 1.0)
    }

    pub fn v(&self) -> f64 {
        self.v
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    /// Doppler factor (1+v)/(1-v).
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn ln_d(&self) -> f64 {
        self.ln_d
    }
    pub fn l_i(&self) -> f64 {
        self.l_i
    }
    pub fn l_f(&self) -> f64 {
        self.l_f
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn duration(&self) -> f64 {
        self.duration
    }
    /// Number of principal-mode phase periods ln(1/rho)/ln d.
    pub fn periods(&self) -> f64 {
        self.periods
    }
    /// Fractional part of [`periods`](Self::periods), in [0, 1).
    pub fn theta(&self) -> f64 {
        self.theta
    }
    /// Final auxiliary time (pi/v) ln(1/rho).
    pub fn chi_f(&self) -> f64 {
        PI * self.periods * self.ln_d / self.v
    }

    pub fn length_at(&self, t: f64) -> f64 {
        self.l_i - self.v * t
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t.is_finite() && (0.0..=self.duration).contains(&t) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                what: "t",
                value: t,
                lo: 0.0,
                hi: self.duration,
            })
        }
    }
}

/// Builds validated parameters from a speed, a squeeze and the initial length.
pub fn params_from(speed: Speed, squeeze: Squeeze, l_i: f64) -> Result<CavityParams> {
    if !(l_i.is_finite() && l_i > 0.0) {
        return Err(Error::InvalidLength(l_i));
    }
    let (v, gamma, d, ln_d) = speed_parts(speed)?;
    let collapse = l_i / v;
    let (rho, duration, periods) = match squeeze {
        Squeeze::Rho(rho) => {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::InvalidSqueeze(rho));
            }
            (rho, l_i * (1.0 - rho) / v, snap(-rho.ln() / ln_d))
        }
        Squeeze::RhoPower(k) => {
            if k == 0 {
                return Err(Error::InvalidSqueeze(1.0));
            }
            let rho = d.powi(-(k as i32));
            if !(rho > 0.0) {
                return Err(Error::InvalidSqueeze(rho));
            }
            (rho, l_i * (1.0 - rho) / v, k as f64)
        }
        Squeeze::Duration(t) => {
            if !(t.is_finite() && t > 0.0 && t < collapse) {
                return Err(Error::InvalidDuration { duration: t, collapse });
            }
            let rho = 1.0 - v * t / l_i;
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::InvalidDuration { duration: t, collapse });
            }
            (rho, t, snap(-(-v * t / l_i).ln_1p() / ln_d))
        }
        Squeeze::Theta(theta) => {
            if !(0.0..1.0).contains(&theta) {
                return Err(Error::OutOfDomain {
                    what: "theta",
                    value: theta,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            let periods = if theta == 0.0 { 1.0 } else { theta };
            let rho = (-periods * ln_d).exp();
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::InvalidSqueeze(rho));
            }
            (rho, l_i * (1.0 - rho) / v, periods)
        }
    };
    let theta = (periods - periods.floor()).clamp(0.0, 1.0 - f64::EPSILON / 2.0);
    Ok(CavityParams {
        v,
        gamma,
        d,
        ln_d,
        l_i,
        l_f: rho * l_i,
        rho,
        duration,
        periods,
        theta,
    })
}

/// Snaps a phase count lying within 1e-12 of a positive integer onto it.
fn snap(periods: f64) -> f64 {
    let k = periods.round();
    if k >= 1.0 && (periods - k).abs() < THETA_SNAP {
        k
    } else {
        periods
    }
}

/// Auxiliary time chi = -(pi/v) ln(1 - v t / l_i); zero at t = 0 and
/// chi_f at the end of the contraction.
pub fn chi_of_t(p: &CavityParams, t: f64) -> Result<f64> {
    p.check_time(t)?;
    Ok(-(PI / p.v) * (-p.v * t / p.l_i).ln_1p())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedModeQuantities {
    /// Instantaneous eigenfrequency pi n / l(t).
    pub omega: f64,
    /// Eigenvalue 2 v n / ln d of the squeeze generator; equidistant in n.
    pub lambda: f64,
    /// Energy pi lambda / l(t) of the stable quasiparticle.
    pub stable_energy: f64,
}

pub fn derived_mode(p: &CavityParams, n: ModeIndex, t: f64) -> Result<DerivedModeQuantities> {
    p.check_time(t)?;
    let l = p.length_at(t);
    let lambda = 2.0 * p.v * n.f() / p.ln_d;
    Ok(DerivedModeQuantities {
        omega: PI * n.f() / l,
        lambda,
        stable_energy: PI * lambda / l,
    })
}
