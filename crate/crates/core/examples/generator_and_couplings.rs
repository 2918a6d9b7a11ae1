//! The quadratic generator of the squeeze (h, g) and the nonadiabatic
//! couplings that switch on when the wall starts or stops.
//!
//! cargo run --example generator_and_couplings

use dce::{generator_matrices, nonadiabatic_couplings};

fn main() -> Result<(), dce::Error> {
    let v = 0.5;
    let gen = generator_matrices(v, 4)?;
    println!("h (v = {v}):");
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:+.4}{:+.4}i", gen.h[(i, j)].re, gen.h[(i, j)].im)).collect();
        println!("  {}", row.join("  "));
    }
    println!("g[0,0] = {:.6}  g[0,1] = {:.6}", gen.g[(0, 0)], gen.g[(0, 1)]);

    let c = nonadiabatic_couplings(v, 6)?;
    let anti = (&c.scattering + c.scattering.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sym = (&c.pairing - c.pairing.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("scattering: max |A + A^H| = {anti:.1e}");
    println!("pairing:    max |B - B^T| = {sym:.1e}");
    for n in 0..3 {
        println!("  A[{n},{n}] = {:+.6}i   B[{n},{n}] = {:+.6}{:+.6}i", c.scattering[(n, n)].im, c.pairing[(n, n)].re, c.pairing[(n, n)].im);
    }
    Ok(())
}
