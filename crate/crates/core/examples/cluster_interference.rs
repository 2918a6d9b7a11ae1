//! Where the two particle clusters sit when the wall stops, and whether
//! their contributions to mode n interfere constructively.
//!
//! cargo run --example cluster_interference

use dce::{cluster_interference, maxima_positions, CavityParams, ModeIndex, Speed, Squeeze};

fn main() -> Result<(), dce::Error> {
    let gamma = 1000.0;
    let d = CavityParams::new(Speed::Gamma(gamma), Squeeze::Theta(0.5))?.d();
    let n = ModeIndex::new(2)?;
    let mut thetas = vec![0.0, 0.5];
    thetas.extend(maxima_positions(n, d)?);
    println!("gamma = {gamma}, n = {}", n.get());
    for theta in thetas {
        let p = CavityParams::new(Speed::Gamma(gamma), Squeeze::Theta(theta))?;
        let (kin, class) = cluster_interference(&p, n, 0.1);
        println!(
            "theta = {theta:.4}: k = {}, separation {:.3e}, n delta / 2 l_f = {:.3} -> {class:?} (j = {})",
            kin.k, kin.delta, kin.ratio, kin.j
        );
    }
    Ok(())
}
