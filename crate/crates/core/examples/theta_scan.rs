//! N_n across a full period of the phase theta, printed as CSV for plotting.
//!
//! cargo run --release --example theta_scan > scan.csv

use dce::{count_local_maxima, linear_grid, scan_theta, CavityParams, ModeIndex, Speed, Squeeze};

fn main() -> Result<(), dce::Error> {
    let d = CavityParams::new(Speed::Gamma(10.0), Squeeze::Theta(0.5))?.d();
    let modes = [ModeIndex::new(1)?, ModeIndex::new(2)?];
    let grid = linear_grid(0.0, 127.0 / 128.0, 128);
    let rows = scan_theta(&modes, d, &grid, 1e-8)?;

    println!("theta,n,N_mean");
    for r in &rows {
        println!("{},{},{}", r.theta, r.n, r.value);
    }
    for n in [1, 2] {
        let curve: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.value).collect();
        eprintln!("n = {n}: {} significant maxima", count_local_maxima(&curve, 0.1));
    }
    Ok(())
}
