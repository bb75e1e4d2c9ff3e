//! The nine acceptance criteria, one pass/fail line each.

use std::io::Write;

use gapfactor::verify::{run_suite, VerifyConfig, SUITES};

#[test]
fn acceptance() {
    let cfg = VerifyConfig::default();
    // straight to the stream so the lines survive test output capture
    let mut err = std::io::stderr().lock();
    let mut failed = Vec::new();
    for (id, _, _) in SUITES {
        let r = run_suite(id, &cfg);
        writeln!(err, "{r}").unwrap();
        if !r.passed() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
