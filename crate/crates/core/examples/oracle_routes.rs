//! Independent routes to the pair-creation block V: piecewise region
//! integration, a two-dimensional quadrature and Heisenberg evolution in a
//! truncated mode basis, each compared with the closed form.
//!
//! cargo run --release --example oracle_routes

use dce::oracles::{compare_routes, evolve_bogoliubov_ode, v_region_integration, CompareOptions, GridPoint, RouteId, StepControl};
use dce::{v_closed, CavityParams, ModeIndex, Speed, Squeeze};

fn main() -> Result<(), dce::Error> {
    let p = CavityParams::new(Speed::Gamma(2.0), Squeeze::Theta(0.5))?;
    let (n, m) = (ModeIndex::new(2)?, ModeIndex::new(3)?);
    let closed = v_closed(n, m, p.d(), p.theta())?;
    let region = v_region_integration(n, m, p.d(), p.theta())?;
    println!("V_23 closed {closed:.12}\nV_23 region {region:.12}");

    let grid = [GridPoint { gamma: 2.0, theta: 0.3, n_max: 3 }, GridPoint { gamma: 10.0, theta: 0.7, n_max: 3 }];
    let opts = CompareOptions { threshold: Some(1e-8), ..Default::default() };
    for r in compare_routes(&grid, &[RouteId::ClosedForm, RouteId::DoubleQuadrature], &opts)? {
        println!("{} vs {}: max diff {:.2e}, passed {}", r.route_a.name(), r.route_b.name(), r.max_abs_diff, r.all_passed());
    }

    // Evolution converges to the closed form only slowly in the basis size.
    for modes in [16, 32, 64] {
        let e = evolve_bogoliubov_ode(&p, modes, 4, &StepControl::default())?;
        let gap = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| {
                let exact = v_closed(ModeIndex::new(i + 1).unwrap(), ModeIndex::new(j + 1).unwrap(), p.d(), p.theta()).unwrap();
                (e.transform.v[(i, j)] - exact).norm()
            })
            .fold(0.0, f64::max);
        println!("evolution, {modes:>2} modes: max |V - V_closed| = {gap:.3e}, drift {:.1e}", e.max_drift);
    }
    Ok(())
}
