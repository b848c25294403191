//! Runs the property suite at a reduced budget and prints one line per check.
//!
//! `cargo run --release --example theorem_suite -- 1000` runs the full budget.

use qme::ensembles::RngSeed;
use qme::suite::{run_all, DEFAULT_DIMS};

fn main() -> qme::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let reports = run_all(trials, &DEFAULT_DIMS, RngSeed(42))?;
    for r in &reports {
        println!("{:<32} {:<5} {:+.3e}", r.id, r.passed, r.worst_margin);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", reports.len());
    Ok(())
}
