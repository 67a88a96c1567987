//! Times one suite at its default parameters:
//! `cargo run --release -p vircheck-core --example timing -- duality`

use std::time::Instant;
use vircheck_core::suites::{run_suite, SuiteOptions};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let suite = args.get(1).map(|s| s.as_str()).unwrap_or("thaddeus");
    let t = Instant::now();
    let report = run_suite(suite, &SuiteOptions::default()).unwrap();
    println!(
        "{}: {:?} cases={} wall={}ms total={:?}",
        suite,
        report.status,
        report.cases_run,
        report.wall_time_ms,
        t.elapsed()
    );
    if let Some(c) = report.first_counterexample {
        println!("counterexample: {c:?}");
    }
}
