//! Mean number of created particles per mode, with rigorous tail bounds,
//! against the large-d plateau and the leading-log estimate.
//!
//! cargo run --release --example particle_spectrum

use dce::{leading_log_estimate, plateau_estimate, spectrum, zero_positions, CavityParams, ModeIndex, Speed, Squeeze};

fn main() -> Result<(), dce::Error> {
    let p = CavityParams::new(Speed::Gamma(10.0), Squeeze::Theta(0.5))?;
    let s = spectrum(p.d(), p.theta(), 8, 1e-10)?;
    println!("gamma = 10, theta = 0.5, d = {:.3}", p.d());
    println!("{:>3} {:>14} {:>10} {:>12} {:>12}", "n", "N", "bound", "plateau", "leading log");
    for e in &s.entries {
        let n = ModeIndex::new(e.n)?;
        println!(
            "{:>3} {:>14.10} {:>10.1e} {:>12.6} {:>12.6}",
            e.n,
            e.value,
            e.tail_bound,
            plateau_estimate(n),
            leading_log_estimate(n, p.d(), p.theta())
        );
    }
    let total: f64 = s.entries.iter().map(|e| e.value).sum();
    println!("sum over n <= 8: {total:.6}");

    println!("\nno creation at rho = d^-k:");
    for z in zero_positions(p.d(), 3)? {
        let q = CavityParams::new(Speed::Gamma(10.0), Squeeze::RhoPower(z.k))?;
        let first = spectrum(q.d(), q.theta(), 1, 1e-12)?.entries[0].value;
        println!("  k = {}  rho = {:.3e}  N_1 = {first}", z.k, z.rho);
    }
    Ok(())
}
