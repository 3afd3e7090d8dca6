//! Runs the fourteen acceptance criteria and prints one PASS/FAIL line each.
//!
//! `cargo test --test acceptance -- 5 10` restricts the run to criteria 5 and 10.

use std::process::ExitCode;

use hankel_core::verify::{run_criterion, CRITERIA};
use hankel_core::QuadratureSpec;

fn main() -> ExitCode {
    // libtest-style flags (--nocapture, --test-threads, ...) are accepted and ignored.
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let spec = QuadratureSpec::default();
    let mut failed = 0;
    let mut ran = 0;
    for (id, ..) in CRITERIA {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        ran += 1;
        match run_criterion(id, &spec) {
            Ok(r) => {
                println!("{}", r.summary_line());
                for c in &r.checks {
                    println!(
                        "    {} {:<40} error {:.3e}  tol {:.0e}  [{}]",
                        if c.pass { "ok  " } else { "FAIL" },
                        c.name,
                        c.max_error,
                        c.tolerance,
                        c.paper_ref
                    );
                }
                if !r.pass() {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("FAIL criterion {id:>2}: {e}");
                failed += 1;
            }
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
