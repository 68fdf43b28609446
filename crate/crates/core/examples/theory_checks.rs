//! Run a reduced theory-validation suite and print one line per check.
//!
//! Run with: `cargo run --release --example theory_checks`

use parallel_thompson::harness::{run_theory_suite, TheoryConfig};

fn main() {
    let cfg = TheoryConfig {
        trials: 200_000,
        concentration_runs: 200,
        throughput_runs: 100,
        ..TheoryConfig::default()
    };
    let report = run_theory_suite(&cfg).unwrap();
    for c in &report.checks {
        let params: Vec<String> = c
            .parameters
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!(
            "{} {:<28} expected {:>10.5} observed {:>10.5}  {:?} {}  [{}]",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.expected,
            c.observed,
            c.relation,
            c.tolerance,
            params.join(", ")
        );
    }
    println!("\n{} passed, {} failed", report.passed, report.failed);
}
