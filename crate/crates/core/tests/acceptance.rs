//! Acceptance suite: runs every verification criterion at full depth and
//! prints one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use prodtest_core::verify::{run_suite, Suite, CRITERION_COUNT};

#[test]
fn acceptance_criteria() {
    let results = run_suite(Suite::Full, 20260810);
    assert_eq!(results.len(), CRITERION_COUNT);
    let mut failed = Vec::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!(
            "[{status}] {:>2}. {:<26} {:>7} ms  {}",
            r.index, r.name, r.millis, r.details
        );
        if !r.passed {
            failed.push(r.index);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
