//! Runs every verification suite and prints one line per check.

use solfold::suites::{run_suite, Suite, SuiteConfig};

fn main() {
    let report = run_suite(Suite::All, &SuiteConfig::default());
    for c in &report.checks {
        println!(
            "{:<40} {:>12.3e} <= {:<10.1e} {}",
            c.name,
            c.residual,
            c.threshold,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
}
