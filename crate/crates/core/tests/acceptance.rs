//! Acceptance suite: every cross-validation criterion at its pinned
//! tolerance, one pass/fail line per check, plus the determinism criterion
//! exercised through the CLI binary at several worker counts.

use fraclame::verify::{run_suite, Report};
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

/// The runtime budgets below assume a dedicated machine, so the criteria run
/// one at a time.
fn serial() -> MutexGuard<'static, ()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    LOCK.get_or_init(|| Mutex::new(()))
        .lock()
        .unwrap_or_else(|e| e.into_inner())
}

fn print_and_collect(report: &Report, failures: &mut Vec<String>) {
    for c in &report.checks {
        let time = if c.seconds > 0.0 {
            format!(" [{:.1}s]", c.seconds)
        } else {
            String::new()
        };
        println!(
            "{} {} (measured {:.3e}, tolerance {:.1e}){}",
            if c.passed() { "PASS" } else { "FAIL" },
            c.test,
            c.measured,
            c.tolerance,
            time
        );
        if !c.passed() {
            failures.push(c.test.clone());
        }
    }
}

#[test]
fn criteria_1_2_11_symbol_algebra_and_constants() {
    let _guard = serial();
    let mut failures = Vec::new();
    let t0 = Instant::now();
    let symbols = run_suite("symbols", 7).expect("symbols suite runs");
    let t_symbols = t0.elapsed().as_secs_f64();
    print_and_collect(&symbols, &mut failures);
    println!("symbols suite: {t_symbols:.2}s (budget 1s)");
    assert!(t_symbols < 1.0, "criterion 1 runtime budget exceeded: {t_symbols:.2}s");

    let t0 = Instant::now();
    let constants = run_suite("constants", 7).expect("constants suite runs");
    let t_constants = t0.elapsed().as_secs_f64();
    print_and_collect(&constants, &mut failures);
    println!("constants suite: {t_constants:.2}s (budget 10s)");
    assert!(t_constants < 10.0, "criterion 2 runtime budget exceeded: {t_constants:.2}s");

    assert!(failures.is_empty(), "failing checks: {failures:?}");
}

#[test]
fn criteria_3_4_5_cross_route_and_peridynamics() {
    let _guard = serial();
    let mut failures = Vec::new();
    let report = run_suite("peridynamics", 7).expect("peridynamics suite runs");
    print_and_collect(&report, &mut failures);
    let cross = report
        .checks
        .iter()
        .find(|c| c.test.contains("cross_route"))
        .expect("cross-route check present");
    println!("cross-route block: {:.2}s (budget 60s)", cross.seconds);
    assert!(cross.seconds < 60.0, "criterion 3 runtime budget exceeded: {:.2}s", cross.seconds);
    assert!(failures.is_empty(), "failing checks: {failures:?}");
}

#[test]
fn criteria_7_8_9_kernels() {
    let _guard = serial();
    let mut failures = Vec::new();
    let report = run_suite("kernels", 7).expect("kernels suite runs");
    print_and_collect(&report, &mut failures);
    assert!(failures.is_empty(), "failing checks: {failures:?}");
}

#[test]
fn criteria_6_10_extension_tower() {
    let _guard = serial();
    let mut failures = Vec::new();
    let t0 = Instant::now();
    let report = run_suite("extension", 7).expect("extension suite runs");
    let dt = t0.elapsed().as_secs_f64();
    print_and_collect(&report, &mut failures);
    println!("extension suite: {dt:.2}s (budget 120s)");
    assert!(dt < 120.0, "criterion 10 runtime budget exceeded: {dt:.2}s");
    assert!(failures.is_empty(), "failing checks: {failures:?}");
}

#[test]
fn criterion_12_dirichlet_solver() {
    let _guard = serial();
    let mut failures = Vec::new();
    let t0 = Instant::now();
    let report = run_suite("dirichlet", 7).expect("dirichlet suite runs");
    let dt = t0.elapsed().as_secs_f64();
    print_and_collect(&report, &mut failures);
    println!("dirichlet suite: {dt:.2}s (budget 300s)");
    assert!(dt < 300.0, "criterion 12 runtime budget exceeded: {dt:.2}s");
    assert!(failures.is_empty(), "failing checks: {failures:?}");
}

/// Criterion 13: byte-identical `verify all` reports across 1/4/8 workers.
#[test]
fn criterion_13_determinism_across_worker_counts() {
    let _guard = serial();
    let bin = env!("CARGO_BIN_EXE_fraclame");
    let dir = std::env::temp_dir().join("fraclame_determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let mut outputs = Vec::new();
    for threads in [1usize, 4, 8] {
        let report = dir.join(format!("report_{threads}.json"));
        let status = std::process::Command::new(bin)
            .args([
                "verify",
                "--suite=all",
                "--seed=7",
                &format!("--threads={threads}"),
                &format!("--output={}", report.display()),
            ])
            .stdout(std::process::Stdio::null())
            .status()
            .expect("binary runs");
        assert!(status.success(), "verify all failed at {threads} workers");
        outputs.push(std::fs::read(&report).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "1-worker and 4-worker reports differ");
    assert_eq!(outputs[1], outputs[2], "4-worker and 8-worker reports differ");
    println!("PASS determinism/verify_all_byte_identical (3 worker configurations)");
    std::fs::remove_dir_all(&dir).ok();
}
