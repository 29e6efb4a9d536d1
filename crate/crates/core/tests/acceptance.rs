//! Acceptance suite: prints one line per criterion.
//!
//! Run a subset with `cargo test --test acceptance -- 2 5`. Stretch targets run
//! when `MINRES_STRETCH=1` is set.
//!
//! Criterion 7 cannot pass against the published r=10 errors: each exceeds
//! `2 sup|f|`, which bounds the error of any non-negative kernel with unit
//! mass. Its report stays FAIL. The process only exits non-zero for it if a
//! failing check is not explained by that bound.

use std::process::ExitCode;

use minres_core::acceptance::{run_criterion, CriterionReport, Status, SuiteConfig, CRITERIA};

/// Criterion whose published targets violate the sup-norm bound.
const BOUND_LIMITED: u8 = 7;

fn explained_by_bound(report: &CriterionReport) -> bool {
    report.failures().all(|c| c.note.contains("exceeds 2 sup|f|"))
}

fn main() -> ExitCode {
    let selected: Vec<u8> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .filter(|id| CRITERIA.contains(id))
        .collect();
    let ids = if selected.is_empty() { CRITERIA.to_vec() } else { selected };
    let cfg = SuiteConfig::from_env();

    let mut unexpected = 0;
    for id in ids {
        let report = run_criterion(id, &cfg);
        println!("{report}");
        for c in report.failures() {
            println!(
                "    fail {}: expected {:?}, measured {:?} {}",
                c.name, c.expected, c.measured, c.note
            );
        }
        for w in &report.warnings {
            println!("    warning: {w}");
        }
        if report.status == Status::Fail {
            if id == BOUND_LIMITED && explained_by_bound(&report) {
                println!("    every failing check has a reference value above 2 sup|f| (see README)");
            } else {
                unexpected += 1;
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria failed");
        ExitCode::FAILURE
    }
}
