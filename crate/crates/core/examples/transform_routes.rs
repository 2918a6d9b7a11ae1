//! The final-state transform (U, V) by its closed form and by the truncated
//! quasiparticle series, side by side.
//!
//! cargo run --release --example transform_routes

use dce::{closed_form_matrices, transform_matrices, CavityParams, QuadratureConfig, Route, Speed, Squeeze};

fn main() -> Result<(), dce::Error> {
    let p = CavityParams::new(Speed::Gamma(2.0), Squeeze::Theta(0.3))?;
    let closed = transform_matrices(&p, 4, &Route::ClosedForm)?;
    let series = transform_matrices(&p, 4, &Route::Series { truncation: 256, quad: QuadratureConfig::default() })?;

    println!("d = {:.4}, theta = {}", p.d(), p.theta());
    println!("{:>3} {:>3} {:>26} {:>26}", "n", "m", "V closed", "V series");
    for n in 0..3 {
        for m in 0..3 {
            let (a, b) = (closed.v[(n, m)], series.v[(n, m)]);
            println!("{:>3} {:>3} {:>+12.8} {:>+12.8}i {:>+12.8} {:>+12.8}i", n + 1, m + 1, a.re, a.im, b.re, b.im);
        }
    }
    let diff = closed.u.iter().zip(series.u.iter()).chain(closed.v.iter().zip(series.v.iter()));
    let diff = diff.map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("max |closed - series| = {diff:.2e} (series error bar {:.2e})", series.err);

    // A whole period of phase (rho = d^-k) leaves U diagonal and V zero.
    let zero = closed_form_matrices(p.d(), 0.0, 8)?;
    println!("theta = 0: max |V| = {}", zero.v.iter().map(|z| z.norm()).fold(0.0, f64::max));

    let check = closed_form_matrices(p.d(), p.theta(), 256)?.unitarity(8);
    println!("closed form, 256 modes: normalization {:.2e}", check.normalization);
    Ok(())
}
