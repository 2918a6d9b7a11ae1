use dce::{
    closed_form_matrices, transform_matrices, u_closed, uv_series, v_closed, CavityParams, ModeIndex,
    QuadratureConfig, Route, Speed, Squeeze,
};

fn mode(n: usize) -> ModeIndex {
    ModeIndex::new(n).unwrap()
}

#[test]
fn zero_phase_kills_pair_creation_exactly() {
    for d in [1.5, 4.0, 14.0, 400.0] {
        let t = closed_form_matrices(d, 0.0, 64).unwrap();
        assert!(t.v.iter().all(|z| z.re == 0.0 && z.im == 0.0), "d = {d}");
        for n in 0..64 {
            for m in 0..64 {
                if n != m {
                    assert_eq!(t.u[(n, m)].norm(), 0.0);
                }
            }
        }
    }
}

#[test]
fn pair_block_is_continuous_across_the_seam() {
    for d in [4.0, 14.0, 400.0] {
        for n in 1..=8 {
            for m in 1..=8 {
                let z = v_closed(mode(n), mode(m), d, 1.0 - 1e-6).unwrap();
                assert!(z.norm() < 1e-3, "d={d} ({n},{m}): {z}");
            }
        }
    }
}

#[test]
fn series_route_matches_closed_forms() {
    let p = CavityParams::new(Speed::Gamma(2.0), Squeeze::Theta(0.3)).unwrap();
    let closed = transform_matrices(&p, 8, &Route::ClosedForm).unwrap();
    let series = transform_matrices(&p, 8, &Route::Series { truncation: 512, quad: QuadratureConfig::default() }).unwrap();
    let diff = closed
        .u
        .iter()
        .zip(series.u.iter())
        .chain(closed.v.iter().zip(series.v.iter()))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert!(diff <= series.err, "diff {diff} outside the series error bar {}", series.err);
    assert!(diff < 1e-6, "diff {diff}");
}

/// (n, n') = (2, 1) at d = 4, theta = 1/2 sits exactly on the vanishing
/// denominator n - n' d^(1 - theta) = 0.
#[test]
fn degenerate_entry_matches_series() {
    let p = CavityParams::new(Speed::Velocity(0.6), Squeeze::Theta(0.5)).unwrap();
    let closed = u_closed(mode(2), mode(1), p.d(), p.theta()).unwrap();
    let s = uv_series(mode(2), mode(1), &p, 512, &QuadratureConfig::default()).unwrap();
    let diff = (closed - s.u).norm();
    assert!(diff <= s.error() && diff < 1e-6, "{closed} vs {} (bound {})", s.u, s.error());
}

#[test]
fn small_phase_diagonal_is_a_unit_phase() {
    let p = CavityParams::new(Speed::Velocity(0.6), Squeeze::Theta(1e-6)).unwrap();
    for n in 1..=3 {
        let u = u_closed(mode(n), mode(n), p.d(), p.theta()).unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-4, "n={n}: {u}");
        let s = uv_series(mode(n), mode(n), &p, 512, &QuadratureConfig::default()).unwrap();
        assert!((u - s.u).norm() < 1e-4 + s.error(), "n={n}: {u} vs {}", s.u);
    }
}

#[test]
fn closed_form_unitarity_improves_with_truncation() {
    let (d, theta) = (CavityParams::new(Speed::Gamma(10.0), Squeeze::Theta(0.2)).unwrap().d(), 0.2);
    let mut last = f64::INFINITY;
    for n in [64, 128, 256, 512] {
        let u = closed_form_matrices(d, theta, n).unwrap().unitarity(8);
        let r = u.normalization.max(u.symplectic);
        assert!(r < last, "N = {n}: {r} after {last}");
        last = r;
        if n == 128 {
            assert!(r < 1e-4, "N = 128 residual {r}");
        }
    }
}

/// Row n of U and V spreads over columns up to about n d^theta; the check is
/// meaningless until the basis covers that support.
#[test]
fn unitarity_needs_the_row_support_inside_the_basis() {
    let theta = 0.5;
    let d = CavityParams::new(Speed::Gamma(10.0), Squeeze::Theta(theta)).unwrap().d();
    let support = 8.0 * d.powf(theta);
    assert!(support > 128.0 && support < 256.0, "{support}");
    let short = closed_form_matrices(d, theta, 128).unwrap().unitarity(8);
    let wide = closed_form_matrices(d, theta, 256).unwrap().unitarity(8);
    assert!(short.normalization > 0.1, "{short:?}");
    assert!(wide.normalization < 1e-2, "{wide:?}");
}
