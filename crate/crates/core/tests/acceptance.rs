//! One pass/fail line per acceptance criterion for the default configuration.
//!
//! Set `CONELAB_BLESS=1` to rewrite the golden report instead of comparing against it.

use std::process::ExitCode;
use std::time::Instant;

use conelab::harness::{diff_reports, run_suite, CheckRecord, DiffTolerance, SuiteConfig, SuiteReport, SUITES};

const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/default_report.json");

/// Wall-clock budgets in seconds, criteria 1 to 9.
const BUDGETS: [f64; 9] = [30.0, 30.0, 180.0, 60.0, 60.0, 120.0, 120.0, 30.0, 180.0];
const TOTAL_BUDGET: f64 = 600.0;

fn detail(c: &CheckRecord) -> String {
    if let Some(d) = &c.diagnostic {
        return d.clone();
    }
    let mut parts: Vec<String> = c
        .limits
        .iter()
        .map(|l| format!("{}={:.3e}{}{:.0e}", l.key, l.value, if l.passed { "≤" } else { ">" }, l.bound))
        .collect();
    parts.extend(c.flags.iter().filter(|(_, f)| !**f).map(|(k, _)| format!("{k}=false")));
    parts.join(" ")
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let start = Instant::now();
    let (report, timings) = match run_suite(&cfg, "all") {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance: suite did not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let total = start.elapsed().as_secs_f64();
    let mut all_ok = true;
    for (i, budget) in BUDGETS.iter().enumerate() {
        let name = SUITES[i].1;
        let c = report.check(name).expect("every criterion has a check");
        let t = timings[name];
        let ok = c.passed && t <= *budget;
        all_ok &= ok;
        println!(
            "criterion {:>2} {} {name} ({t:.1}s of {budget:.0}s) {}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            detail(c)
        );
    }

    let json = report.to_json();
    let golden = if std::env::var_os("CONELAB_BLESS").is_some() {
        std::fs::write(GOLDEN, &json).expect("golden report is writable");
        Some(json.clone())
    } else {
        std::fs::read_to_string(GOLDEN).ok()
    };
    let det = report.check(SUITES[9].1).expect("determinism check");
    let (identical, moved) = match &golden {
        Some(g) => {
            let moved = SuiteReport::from_json(g)
                .map(|b| diff_reports(&b, &report, &DiffTolerance::default()).len())
                .unwrap_or(usize::MAX);
            (*g == json, moved)
        }
        None => (false, usize::MAX),
    };
    let ok = det.passed && identical && total <= TOTAL_BUDGET;
    all_ok &= ok;
    println!(
        "criterion 10 {} {} (rerun identical={}, golden byte-identical={identical}, golden fields moved={}, total {total:.1}s of {TOTAL_BUDGET:.0}s)",
        if ok { "PASS" } else { "FAIL" },
        SUITES[9].1,
        det.passed,
        if moved == usize::MAX { "n/a".to_string() } else { moved.to_string() },
    );
    println!("acceptance: {}", if all_ok { "all criteria pass" } else { "FAILED" });
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
