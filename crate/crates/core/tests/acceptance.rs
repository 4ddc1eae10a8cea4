//! The acceptance battery: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p cheeger-core --test acceptance -- --nocapture` to
//! see the lines.

use cheeger_core::battery::{verify_suite, BatteryReport};

const SEED: u64 = 1;

fn print_report(r: &BatteryReport) {
    for c in &r.criteria {
        println!("{}", c.summary_line());
        for f in c.failures.iter().take(5) {
            println!("    {} :: {} ({:e} vs {:e})", f.instance, f.check, f.lhs, f.rhs);
        }
    }
}

#[test]
fn acceptance_criteria() {
    let report = verify_suite(SEED).expect("battery runs");
    print_report(&report);
    let ids: Vec<u8> = report.criteria.iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=13).collect::<Vec<u8>>());
    let failed: Vec<u8> = report.criteria.iter().filter(|c| !c.passed()).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
