//! Coefficients alpha, beta between the static modes and the stable
//! quasiparticles of a wall moving at speed v, with their unitarity.
//!
//! cargo run --example bogoliubov_coefficients

use dce::{alpha_beta, bogoliubov_matrices, coefficient_envelope, ModeIndex, QuadratureConfig};

fn main() -> Result<(), dce::Error> {
    let v = 0.5;
    let quad = QuadratureConfig::default();

    println!("{:>3} {:>3} {:>24} {:>24} {:>10}", "n", "m", "alpha", "beta", "|b| bound");
    for (n, m) in [(1, 1), (1, 2), (2, 1), (3, 7), (8, 2)] {
        let (a, b, _err) = alpha_beta(ModeIndex::new(n)?, ModeIndex::new(m)?, v, &quad)?;
        let (_, beta_env) = coefficient_envelope(n, m, v)?;
        println!("{n:>3} {m:>3} {:>+11.6}{:>+11.6}i {:>+11.6}{:>+11.6}i {beta_env:>10.2e}", a.re, a.im, b.re, b.im);
    }

    // Residuals fall as the summed columns grow.
    for size in [16, 32, 64] {
        let c = bogoliubov_matrices(v, size, &quad)?.unitarity(4);
        println!("N = {size:>3}: normalization {:.2e}  symplectic {:.2e}", c.normalization, c.symplectic);
    }
    Ok(())
}
