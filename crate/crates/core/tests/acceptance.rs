//! Runs every acceptance criterion and prints one line per criterion.

use std::time::Instant;

use ecsent_core::verify::{run_criterion, CRITERIA};

#[test]
fn acceptance_suite() {
    let start = Instant::now();
    let mut failed = Vec::new();
    for id in CRITERIA {
        let checks = run_criterion(id);
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        println!("criterion {id:2}: {}", if pass { "PASS" } else { "FAIL" });
        for c in &checks {
            println!(
                "    {} {:<40} value={:.15e} expected={:.15e} tol={:.1e}",
                if c.pass { "ok  " } else { "FAIL" },
                c.check,
                c.value,
                c.expected,
                c.tol
            );
        }
        if !pass {
            failed.push(id);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let in_time = secs < 300.0;
    println!("whole suite: {} ({secs:.1} s, limit 300 s)", if in_time { "PASS" } else { "FAIL" });
    assert!(in_time, "suite took {secs:.1} s");
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
