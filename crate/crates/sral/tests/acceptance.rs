//! Runs every acceptance criterion with the default seed and prints one
//! pass/fail line each. Exits nonzero when any criterion fails or exceeds
//! its time limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use sral::verify::{RunConfig, CRITERIA};

fn time_limit(id: u8) -> Option<Duration> {
    match id {
        1 => Some(Duration::from_secs(5)),
        2 => Some(Duration::from_secs(10)),
        3 => Some(Duration::from_secs(60)),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let mut failures = 0;
    println!("acceptance suite, seed {}", cfg.seed);
    for c in &CRITERIA {
        let start = Instant::now();
        let report = (c.run)(&cfg);
        let elapsed = start.elapsed();
        let in_time = time_limit(c.id).is_none_or(|limit| elapsed <= limit);
        let ok = report.passed && in_time;
        failures += usize::from(!ok);
        let mut line = format!(
            "C{:<2} {:<14} {}  {:>4}/{:<4} cases  {:>8.2?}  {}",
            c.id,
            c.name,
            if ok { "PASS" } else { "FAIL" },
            report.cases - report.violations,
            report.cases,
            elapsed,
            c.summary
        );
        if !in_time {
            line.push_str(&format!(" [over the {:?} limit]", time_limit(c.id).unwrap_or_default()));
        }
        if let Some(f) = &report.first_failure {
            line.push_str(&format!(" [first failure: {f}]"));
        }
        println!("{line}");
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
