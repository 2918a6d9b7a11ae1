use std::f64::consts::PI;

use dce::{
    alpha_beta, bogoliubov_block, bogoliubov_matrices, generator_matrices, nonadiabatic_couplings, romberg,
    stable_particle_energy, CavityParams, ModeIndex, QuadratureConfig, Speed, Squeeze,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn mode(n: usize) -> ModeIndex {
    ModeIndex::new(n).unwrap()
}

fn tight() -> QuadratureConfig {
    QuadratureConfig { rel_tol: 1e-13, abs_tol: 1e-15, ..Default::default() }
}

/// The overlap integrand written out directly: sign = -1 gives alpha, +1 beta.
fn overlap_integrand(n: usize, m: usize, v: f64, sign: f64) -> impl Fn(f64) -> Complex64 {
    let ln_d = ((1.0 + v) / (1.0 - v)).ln();
    let mu = 2.0 * PI * n as f64 / ln_d;
    let pre = 0.5 * (m as f64 / n as f64).sqrt();
    move |y: f64| pre * Complex64::from_polar(1.0, -mu * (1.0 - v * y).ln() + sign * PI * m as f64 * y)
}

#[test]
fn kronrod_and_romberg_routes_agree() {
    let (a, b, _) = alpha_beta(mode(1), mode(1), 0.6, &tight()).unwrap();
    let breaks: Vec<f64> = (0..=16).map(|k| -1.0 + k as f64 / 8.0).collect();
    let ra = romberg(overlap_integrand(1, 1, 0.6, -1.0), &breaks, 1e-13, 22);
    let rb = romberg(overlap_integrand(1, 1, 0.6, 1.0), &breaks, 1e-13, 22);
    assert!((a - ra.value).norm() < 1e-10, "{a} vs {}", ra.value);
    assert!((b - rb.value).norm() < 1e-10, "{b} vs {}", rb.value);
}

/// beta is the alpha integral with the oscillation sign flipped.
#[test]
fn beta_is_alpha_with_negated_mode() {
    let breaks: Vec<f64> = (0..=32).map(|k| -1.0 + k as f64 / 16.0).collect();
    for (n, m, v) in [(1, 3, 0.3), (2, 5, 0.6), (4, 2, 0.9)] {
        let (_, b, _) = alpha_beta(mode(n), mode(m), v, &tight()).unwrap();
        let r = romberg(overlap_integrand(n, m, v, 1.0), &breaks, 1e-12, 24);
        assert!((b - r.value).norm() < 1e-9, "({n},{m},{v}): {b} vs {}", r.value);
    }
}

#[test]
fn unitarity_at_sixty_four_columns() {
    let m = bogoliubov_block(0.5, 8, 64, &QuadratureConfig::default()).unwrap();
    let u = m.unitarity(8);
    assert!(u.normalization < 1e-3, "{u:?}");
    assert!(u.symplectic < 1e-3, "{u:?}");
}

#[test]
fn residual_halves_when_truncation_doubles() {
    let q = QuadratureConfig::default();
    let r16 = bogoliubov_matrices(0.6, 16, &q).unwrap().unitarity(2);
    let r32 = bogoliubov_matrices(0.6, 32, &q).unwrap().unitarity(2);
    assert!(r32.normalization <= 0.5 * r16.normalization, "{r16:?} -> {r32:?}");
}

#[test]
fn fast_wall_coefficients_decay_off_the_band() {
    let m = bogoliubov_matrices(0.9, 8, &QuadratureConfig::default()).unwrap();
    assert!(m.alpha.iter().chain(m.beta.iter()).all(|z| z.re.is_finite() && z.im.is_finite()));
    // |beta_{n m}| envelope ~ 1/(n + m): the largest entry along each
    // anti-diagonal shrinks as n + m grows past the band.
    let far = |s: usize| (1..s).filter(|&n| s - n <= 8 && n <= 8).map(|n| m.beta[(n - 1, s - n - 1)].norm()).fold(0.0, f64::max);
    assert!(far(16) < far(6), "{} vs {}", far(16), far(6));
}

#[test]
fn generator_cross_term_for_two_modes() {
    let g = generator_matrices(0.5, 2).unwrap();
    // h_12 = -(i v / pi) (-1)^3 sqrt(2) / (2 - 1).
    let expected = Complex64::new(0.0, 0.5 * 2f64.sqrt() / PI);
    assert!((g.h[(0, 1)] - expected).norm() < 1e-15);
    assert!((g.h[(1, 0)] - expected.conj()).norm() < 1e-15);
}

/// The commutator residual of the truncated generator falls steadily with
/// the basis size (first order in 1/N).
#[test]
fn generator_diagonalization_converges() {
    let q = QuadratureConfig::default();
    let mut last = f64::INFINITY;
    for n in [16, 32, 64] {
        let coeffs = bogoliubov_matrices(0.5, n, &q).unwrap();
        let r = generator_matrices(0.5, n).unwrap().eigen_residual(&coeffs, 4, 8).unwrap();
        assert!(r < 0.75 * last, "N = {n}: {r} after {last}");
        last = r;
    }
    assert!(last < 1e-2, "{last}");
}

/// Couplings from their defining sums: central differences of the overlap
/// coefficients in v, contracted over 256 intermediate modes.
#[test]
fn couplings_match_finite_difference_sums() {
    let (v, dv, rows, cols) = (0.5, 1e-4, 4, 256);
    let q = tight();
    let at = bogoliubov_block(v, rows, cols, &q).unwrap();
    let hi = bogoliubov_block(v + dv, rows, cols, &q).unwrap();
    let lo = bogoliubov_block(v - dv, rows, cols, &q).unwrap();
    let da: DMatrix<Complex64> = (&hi.alpha - &lo.alpha) / Complex64::new(2.0 * dv, 0.0);
    let db: DMatrix<Complex64> = (&hi.beta - &lo.beta) / Complex64::new(2.0 * dv, 0.0);
    let c = nonadiabatic_couplings(v, rows).unwrap();
    for n in 0..rows {
        for m in 0..rows {
            let mut a = Complex64::new(0.0, 0.0);
            let mut b = Complex64::new(0.0, 0.0);
            for k in 0..cols {
                a += da[(n, k)] * at.alpha[(m, k)].conj() - at.beta[(m, k)].conj() * db[(n, k)];
                b += db[(n, k)] * at.alpha[(m, k)] - at.beta[(m, k)] * da[(n, k)];
            }
            assert!((a - c.scattering[(n, m)]).norm() < 1e-4, "A({},{}) {a} vs {}", n + 1, m + 1, c.scattering[(n, m)]);
            assert!((b - c.pairing[(n, m)]).norm() < 1e-4, "B({},{}) {b} vs {}", n + 1, m + 1, c.pairing[(n, m)]);
        }
    }
}

#[test]
fn pairing_coupling_slow_wall_limit() {
    let c = nonadiabatic_couplings(1e-7, 4).unwrap();
    for n in 1..=4usize {
        for m in 1..=4usize {
            let sign = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
            let limit = Complex64::new(0.0, sign * ((n * m) as f64).sqrt() / (PI * ((n + m) as f64).powi(2)));
            assert!((c.pairing[(n - 1, m - 1)] - limit).norm() < 1e-6, "({n},{m})");
        }
    }
}

#[test]
fn stable_energies_follow_the_length() {
    let p = CavityParams::new(Speed::Velocity(0.6), Squeeze::Rho(0.3)).unwrap();
    let e0 = stable_particle_energy(&p, mode(1), 0.0).unwrap();
    let e1 = stable_particle_energy(&p, mode(1), p.duration()).unwrap();
    assert!((e1 / e0 - 1.0 / 0.3).abs() < 1e-12);
    assert!((e0 - PI * 1.2 / 4f64.ln()).abs() < 1e-12);
}
