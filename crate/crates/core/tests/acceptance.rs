//! Runs every acceptance criterion and prints one PASS/FAIL line per
//! criterion, followed by the individual items.

use std::time::Instant;

use fanforms::verify::{run_criterion, VerifyConfig, CRITERIA};

fn main() {
    let cfg = VerifyConfig::default();
    let mut failed = Vec::new();
    for k in CRITERIA {
        let start = Instant::now();
        let items = run_criterion(k, &cfg);
        let ok = !items.is_empty() && items.iter().all(|i| i.passed);
        println!("{} criterion {k} ({:.2}s)", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
        for i in &items {
            println!("    {} {}: {}", if i.passed { "ok  " } else { "FAIL" }, i.id, i.detail);
        }
        if !ok {
            failed.push(k);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
