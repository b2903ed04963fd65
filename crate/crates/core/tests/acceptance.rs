//! Runs every acceptance criterion and prints one line per criterion.

use std::io::Write;

use cpl_core::gen::DEFAULT_SEED;
use cpl_core::selftest::{run, CRITERIA};

#[test]
fn acceptance_criteria() {
    let outcomes: Vec<_> = (1..=CRITERIA.len()).map(|id| run(id, DEFAULT_SEED)).collect();
    // Written to the raw stream so the lines survive output capture.
    let mut err = std::io::stderr().lock();
    for o in &outcomes {
        writeln!(err, "{o}").unwrap();
    }
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.passed).map(|o| o.to_string()).collect();
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.join("\n"));
}
