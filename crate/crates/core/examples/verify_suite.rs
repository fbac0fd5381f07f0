//! Runs the full verification suite in-process and prints one line per check.

use hkqk::cli::{cmd_verify, RunConfig};

fn main() -> hkqk::Result<()> {
    let mut config = RunConfig::new(1, 1.0, 42);
    config.samples = 8;
    let report = cmd_verify(&config)?;
    for r in &report.results {
        let verdict = if r.passed { "ok" } else { "FAIL" };
        println!(
            "{verdict:>4} {:<26} {:.2e} < {:.0e}",
            r.name, r.max_residual, r.tolerance
        );
    }
    println!("{} passed, {} failed", report.passed(), report.failed());
    Ok(())
}
