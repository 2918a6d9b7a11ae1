//! Adaptive Gauss–Kronrod and Romberg integration over real intervals.
//!
//! Integrands may be real, complex, or a pair of complex values evaluated
//! together (the forward and backward Bogoliubov integrands share the
//! expensive power-law phase).

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Values an integrand can return.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn modulus(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(&self) -> f64 {
        self.norm()
    }
}

/// Two complex integrands sharing one abscissa set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub Complex64, pub Complex64);

impl Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for Pair {
    type Output = Pair;
    fn sub(self, o: Pair) -> Pair {
        Pair(self.0 - o.0, self.1 - o.1)
    }
}

impl Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, s: f64) -> Pair {
        Pair(self.0 * s, self.1 * s)
    }
}

impl QuadValue for Pair {
    fn zero() -> Self {
        Pair(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }
    // The larger component governs refinement.
    fn modulus(&self) -> f64 {
        self.0.norm().max(self.1.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Split at half-period breakpoints of the integrand's phase before refining.
    pub oscillation_split: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_subdivisions: 20_000,
            oscillation_split: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

#[derive(Debug, Clone, Copy)]
struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    /// Roundoff level of this panel; bisection cannot push the error below it.
    floor: f64,
}

/// One 21-point Kronrod rule with the QUADPACK error heuristic.
fn gk21<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> Panel<V> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = V::zero();
    let mut resabs = fc.modulus() * WGK[10];
    let mut fv1 = [V::zero(); 10];
    let mut fv2 = [V::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk = resk + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.modulus() + f2.modulus());
        if j % 2 == 1 {
            resg = resg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).modulus();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).modulus() + (fv2[j] - mean).modulus());
    }
    let scale = half.abs();
    let resabs = resabs * scale;
    let resasc = resasc * scale;
    let mut err = ((resk - resg) * half).modulus();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    Panel {
        a,
        b,
        value: resk * half,
        error: err,
        floor,
    }
}

/// Adaptive GK21 over the panels delimited by `breakpoints` (sorted, at least two).
///
/// The worst panel is bisected until the summed error meets
/// `max(abs_tol, rel_tol * |I|)`, or is down to the roundoff level of the
/// integrand, or the subdivision budget runs out; the last case returns the
/// best estimate with `converged = false`.
pub fn integrate<V, F>(f: F, breakpoints: &[f64], cfg: &QuadratureConfig) -> Integral<V>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    assert!(breakpoints.len() >= 2, "need at least one panel");
    let mut panels: Vec<Panel<V>> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk21(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * panels.len();
    let mut subdivisions = 0usize;
    loop {
        let total = panels.iter().fold(V::zero(), |acc, p| acc + p.value);
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let floor: f64 = panels.iter().map(|p| p.floor).sum();
        // Bisection cannot push rounding noise below the floor; an error within
        // twice the summed floor is already roundoff-dominated.
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.modulus()).max(2.0 * floor);
        if error <= tol {
            return Integral { value: total, error, evaluations, converged: true };
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        let exhausted = subdivisions >= cfg.max_subdivisions;
        let unresolvable = !(mid > p.a && mid < p.b) || (p.b - p.a) <= 1e-15 * p.a.abs().max(p.b.abs());
        if exhausted || unresolvable {
            return Integral { value: total, error, evaluations, converged: false };
        }
        let left = gk21(&f, p.a, mid);
        let right = gk21(&f, mid, p.b);
        evaluations += 42;
        subdivisions += 1;
        panels[worst] = left;
        panels.push(right);
    }
}

/// Romberg extrapolation of the trapezoid rule, panel by panel.
///
/// Independent of the Kronrod machinery; used as a cross-check route.
pub fn romberg<F>(f: F, breakpoints: &[f64], rel_tol: f64, max_levels: usize) -> Integral<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut converged = true;
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut rows: Vec<Vec<Complex64>> = Vec::with_capacity(max_levels);
        let mut trap = (f(a) + f(b)) * (0.5 * (b - a));
        evaluations += 2;
        rows.push(vec![trap]);
        let mut done = false;
        let mut last_err = f64::INFINITY;
        for level in 1..max_levels {
            let n = 1usize << (level - 1);
            let h = (b - a) / n as f64;
            let mut mids = Complex64::new(0.0, 0.0);
            for i in 0..n {
                mids += f(a + (i as f64 + 0.5) * h);
            }
            evaluations += n;
            trap = trap * 0.5 + mids * (0.5 * h);
            let mut row = vec![trap];
            let mut factor = 1.0;
            for k in 1..=level {
                factor *= 4.0;
                let prev = rows[level - 1][k - 1];
                let cur = row[k - 1];
                row.push(cur + (cur - prev) / (factor - 1.0));
            }
            let best = row[level];
            last_err = (best - rows[level - 1][level - 1]).norm();
            rows.push(row);
            if level >= 4 && last_err <= rel_tol * best.norm().max(1e-300) {
                done = true;
                break;
            }
        }
        let best = *rows.last().and_then(|r| r.last()).expect("non-empty");
        total += best;
        error += last_err;
        converged &= done;
    }
    Integral { value: total, error, evaluations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact_on_one_panel() {
        let r = integrate(|x: f64| x.powi(7) - 3.0 * x * x, &[-1.0, 2.0], &QuadratureConfig::default());
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!(r.converged);
        assert!((r.value - exact).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        let k = 200.0 * PI;
        let r = integrate(
            |x: f64| Complex64::from_polar(1.0, k * x) * x,
            &[0.0, 1.0],
            &QuadratureConfig::default(),
        );
        // ∫ x e^{ikx} over [0,1] with k a multiple of 2π equals 1/(ik).
        let exact = Complex64::new(0.0, -1.0 / k);
        assert!(r.converged);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig { max_subdivisions: 2, ..Default::default() };
        let r = integrate(|x: f64| (1000.0 * x).sin().abs(), &[0.0, 10.0], &cfg);
        assert!(!r.converged);
        assert!(r.error > 0.0);
    }

    #[test]
    fn romberg_agrees_with_kronrod() {
        let f = |x: f64| Complex64::from_polar(1.0 / (1.0 + x * x), 3.0 * x);
        let a = romberg(f, &[-1.0, 0.0, 1.0], 1e-13, 24);
        let b = integrate(f, &[-1.0, 1.0], &QuadratureConfig::default());
        assert!(a.converged);
        assert!((a.value - b.value).norm() < 1e-11);
    }

    #[test]
    fn pair_integrates_both_components() {
        let r = integrate(
            |x: f64| Pair(Complex64::new(x, 0.0), Complex64::new(0.0, x * x)),
            &[0.0, 3.0],
            &QuadratureConfig::default(),
        );
        assert!((r.value.0.re - 4.5).abs() < 1e-13);
        assert!((r.value.1.im - 9.0).abs() < 1e-13);
    }
}
