//! Where particle creation peaks: the cluster-resonance prediction against
//! a golden-section search of the exact sum.
//!
//! cargo run --release --example resonance_maxima

use dce::{exact_maximum_search, maxima_positions, CavityParams, ModeIndex, Speed, Squeeze};

fn main() -> Result<(), dce::Error> {
    println!("{:>6} {:>3} {:>22} {:>10} {:>10}", "gamma", "n", "predicted", "exact", "N_max");
    for gamma in [2.0, 10.0, 100.0] {
        let d = CavityParams::new(Speed::Gamma(gamma), Squeeze::Theta(0.5))?.d();
        for n in [1, 2] {
            let n = ModeIndex::new(n)?;
            let predicted: Vec<String> = maxima_positions(n, d)?.iter().map(|t| format!("{t:.4}")).collect();
            let found = exact_maximum_search(n, d, (1e-3, 1.0 - 1e-3), 1e-6)?;
            println!(
                "{gamma:>6} {:>3} {:>22} {:>10.4} {:>10.5}{}",
                n.get(),
                predicted.join(" "),
                found.theta,
                found.value,
                if found.multimodal { "  (multimodal)" } else { "" }
            );
        }
    }
    Ok(())
}
