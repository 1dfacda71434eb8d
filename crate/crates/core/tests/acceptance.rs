//! One PASS/FAIL line per acceptance criterion, with runtime limits pinned.
//!
//! Two criteria are known to be unattainable as stated; they are run in full and reported
//! as FAIL. The test itself fails when any other criterion fails, or when a known failure
//! stops failing, so the list below cannot go stale.
//!
//! Runs without the libtest harness so the report is printed on every `cargo test`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use relic::suite::{self, CriterionReport, SuiteOptions};

/// Criteria that fail for reasons in the mathematics, with the checks that fail.
const KNOWN_FAILURES: &[(u8, &[&str])] = &[
    // No variant of the third embedding sends demonic composition to sequencing.
    (2, &["psi3 maps * to ;"]),
    // The grid strategy breaks its own invariants from the second round on.
    (
        6,
        &[
            "A_4: the grid strategy survives with its invariants",
            "A_5: the grid strategy survives with its invariants",
        ],
    ),
];

const LIMITS_SECS: [u64; 7] = [5, 5, 30, 120, 180, 600, 10];

fn structured(reports: &[CriterionReport]) -> String {
    reports.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
}

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    type Sweep = Box<dyn Fn(&SuiteOptions) -> relic::Result<CriterionReport>>;
    let sweeps: Vec<Sweep> = vec![
        Box::new(|_| suite::operation_laws()),
        Box::new(|_| suite::program_embeddings()),
        Box::new(|_| suite::correctness_sweep()),
        Box::new(|_| suite::representation_suite()),
        Box::new(suite::law_presets),
        Box::new(suite::game_lemmas),
        Box::new(|_| suite::an_order()),
    ];
    let mut reports = Vec::new();
    let mut unexpected = Vec::new();
    for (i, sweep) in sweeps.iter().enumerate() {
        let start = Instant::now();
        let report = sweep(&opts).expect("sweep runs");
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(LIMITS_SECS[i]);
        let in_time = elapsed <= limit;
        let ok = report.passed && in_time;
        println!(
            "{} criterion {}: {} ({:.2}s, limit {}s)",
            if ok { "PASS" } else { "FAIL" },
            report.criterion,
            report.title,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
        for c in &report.checks {
            println!("    [{}] {}{}", if c.passed { "ok" } else { "FAILED" }, c.name, if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) });
        }
        let failed: Vec<&str> = report.failed_checks().map(|c| c.name.as_str()).collect();
        let known: &[&str] = KNOWN_FAILURES.iter().find(|k| k.0 == report.criterion).map(|k| k.1).unwrap_or(&[]);
        if !in_time {
            unexpected.push(format!("criterion {} took {:.2}s", report.criterion, elapsed.as_secs_f64()));
        }
        if failed != known {
            unexpected.push(format!("criterion {}: failing checks {failed:?}, known failures {known:?}", report.criterion));
        }
        reports.push(report);
    }
    let first = structured(&reports);
    let rerun = structured(&suite::run_all(&opts).expect("rerun"));
    let deterministic = first == rerun;
    println!("{} criterion 8: identical structured output on rerun ({} bytes)", if deterministic { "PASS" } else { "FAIL" }, first.len());
    if !deterministic {
        unexpected.push("criterion 8: rerun output differs".into());
    }
    if unexpected.is_empty() {
        println!("acceptance: all results as expected");
        ExitCode::SUCCESS
    } else {
        eprintln!("acceptance: unexpected results {unexpected:#?}");
        ExitCode::FAILURE
    }
}
