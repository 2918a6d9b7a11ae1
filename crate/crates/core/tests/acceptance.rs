//! Acceptance run: every criterion at its stated tolerance, one PASS/FAIL
//! line each. Exits non-zero if any criterion fails.
//!
//! Pass criterion numbers to run a subset: `cargo test --test acceptance -- 1 3`.

use std::process::ExitCode;
use std::time::Instant;

use dce::cli::{run_suite, Status};

const CRITERIA: [(u32, &str, &str); 9] = [
    (1, "zeros of particle creation at rho = d^-k", "zeros"),
    (2, "maxima table: exact and predicted theta_max", "maxima"),
    (3, "plateau values at gamma = 1000, theta = 0.5", "plateau"),
    (4, "more than one particle in the principal mode at gamma = 1000", "threshold"),
    (5, "route equivalence: region, 2-D quadrature, evolution", "oracles"),
    (6, "unitarity residuals shrink with truncation", "unitarity"),
    (7, "tail law: slope -1 +- 0.1", "tail-slope"),
    (8, "theta-scan structure", "figure"),
    (9, "Milne-mode Gram matrix is the identity", "milne"),
];

fn main() -> ExitCode {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, title, suite) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let records = run_suite(suite);
        for r in &records {
            let mark = if r.status == Status::Pass { "ok  " } else { "FAIL" };
            println!("    {mark} {:<44} measured {:<24} threshold {}", r.check, format!("{:e}", r.measured), r.threshold);
            if let Some(e) = r.params.get("error") {
                println!("         error: {e}");
            }
        }
        let pass = !records.is_empty() && records.iter().all(|r| r.status == Status::Pass);
        failed += usize::from(!pass);
        println!(
            "criterion {id}: {} - {title} ({} checks, {:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            records.len(),
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
