//! One line per acceptance criterion; the test fails if any line fails.
//!
//! Lines go straight to the process stdout, bypassing the harness capture,
//! so they show up in plain `cargo test` logs.

use std::io::Write;

use nadyn::selftest::{run_all, CRITERION_COUNT, DEFAULT_SEED};

#[test]
fn acceptance() {
    let results = run_all(DEFAULT_SEED);
    assert_eq!(results.len(), usize::from(CRITERION_COUNT));
    let failed: Vec<u8> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();

    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for r in &results {
        writeln!(out, "{r}").unwrap();
    }
    writeln!(out, "acceptance: {} of {} criteria passed", results.len() - failed.len(), results.len()).unwrap();
    out.flush().unwrap();

    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
