//! Contraction kinematics: Doppler factor, fractional phase, auxiliary time
//! and the stable-quasiparticle energies for one cavity.
//!
//! cargo run --example cavity_kinematics

use dce::{chi_of_t, derived_mode, params_from, CavityParams, ModeIndex, Speed, Squeeze};

fn main() -> Result<(), dce::Error> {
    let p = CavityParams::new(Speed::Velocity(0.6), Squeeze::Rho(0.3))?;
    println!("v = {}  gamma = {:.6}  d = {:.6}", p.v(), p.gamma(), p.d());
    println!("rho = {}  T = {:.6}  periods = {:.6}  theta = {:.6}", p.rho(), p.duration(), p.periods(), p.theta());

    // The same contraction, specified by its duration.
    let same = params_from(Speed::Velocity(0.6), Squeeze::Duration(p.duration()), 1.0)?;
    println!("theta from duration = {:.6}", same.theta());

    // rho = d^-k: an integer number of periods, no fractional phase.
    let whole = CavityParams::new(Speed::Velocity(0.6), Squeeze::RhoPower(2))?;
    println!("rho = d^-2 = {:.6}  theta = {}", whole.rho(), whole.theta());

    println!("\n{:>8} {:>10} {:>10}", "t", "l(t)", "chi(t)");
    for i in 0..=5 {
        let t = (p.duration() * i as f64 / 5.0).min(p.duration());
        println!("{t:>8.4} {:>10.6} {:>10.6}", p.length_at(t), chi_of_t(&p, t)?);
    }

    println!("\n{:>3} {:>10} {:>12} {:>12}", "n", "lambda", "E(0)", "E(T)");
    for n in 1..=4 {
        let n = ModeIndex::new(n)?;
        let start = derived_mode(&p, n, 0.0)?;
        let end = derived_mode(&p, n, p.duration())?;
        println!("{:>3} {:>10.6} {:>12.6} {:>12.6}", n.get(), start.lambda, start.stable_energy, end.stable_energy);
    }
    Ok(())
}
