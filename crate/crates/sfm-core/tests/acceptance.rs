//! Acceptance suite: runs every criterion and prints one pass/fail line per
//! criterion. `sfm selftest` runs the same suite from the command line.

use sfm_core::batch::default_parallelism;
use sfm_core::selftest::run_selftest;

#[test]
fn acceptance_criteria() {
    let report = run_selftest(default_parallelism());
    print!("{}", report.render());
    assert!(report.all_pass(), "\n{}", report.render());
}
