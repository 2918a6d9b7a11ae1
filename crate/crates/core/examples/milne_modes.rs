//! Milne-coordinate modes inside the contracting cavity: field values and
//! the Klein-Gordon Gram matrix, which stays the identity for all t.
//!
//! cargo run --example milne_modes

use dce::{gram_matrix, milne_mode_value, CavityParams, MilneMode, ModeIndex, QuadratureConfig, Speed, Squeeze};

fn main() -> Result<(), dce::Error> {
    let p = CavityParams::new(Speed::Velocity(0.6), Squeeze::Rho(0.3))?;
    let mode = MilneMode::new(ModeIndex::new(2)?, p);

    let t = 0.5 * p.duration();
    println!("phi_2 at t = {t:.4}, wall at {:.4}", p.length_at(t));
    for i in 0..=4 {
        let x = p.length_at(t) * i as f64 / 4.0;
        let f = milne_mode_value(&mode, x, t)?;
        println!("  x = {x:.4}  phi = {:+.6} {:+.6}i", f.re, f.im);
    }

    let quad = QuadratureConfig::default();
    for t in [0.0, 0.5 * p.duration(), p.duration()] {
        let g = gram_matrix(&p, 6, t, &quad)?;
        let off = (&g - nalgebra::DMatrix::identity(6, 6)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        println!("t = {t:.4}: max |G - I| = {off:.2e}");
    }
    Ok(())
}
