//! End-to-end checks of the command-line surface: exit codes, file formats,
//! and the cross-route oracle through the binary.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fraclame")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fraclame_cli_{name}"));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn malformed_config_exits_2() {
    let dir = tmpdir("malformed");
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, "{\"n\": 31}").unwrap();
    let status = Command::new(bin())
        .args(["apply", "--config", cfg.to_str().unwrap()])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // non-JSON config
    std::fs::write(&cfg, "not json").unwrap();
    let status = Command::new(bin())
        .args(["apply", "--config", cfg.to_str().unwrap()])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_suite_exits_2() {
    let status = Command::new(bin())
        .args(["verify", "--suite=nope"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn apply_both_routes_on_bundled_wave() {
    let dir = tmpdir("apply_both");
    let out = Command::new(bin())
        .args([
            "apply",
            "--operator=lame_s",
            "--route=both",
            "--s=0.5",
            "--n=64",
            "--sample_points=48",
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let disc = v["route_discrepancy"].as_f64().unwrap();
    assert!(disc <= 1e-3, "route discrepancy {disc}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn apply_classical_boundary_order() {
    // s = 1 spectral equals the classical operator; the library computes the
    // identity exactly, here just confirm the CLI accepts the boundary order
    let dir = tmpdir("apply_s1");
    let status = Command::new(bin())
        .args(["apply", "--operator=lame_s", "--route=spectral", "--s=1.0", "--n=32"])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn kernel_table_monotone_along_ray() {
    let dir = tmpdir("kernels");
    let status = Command::new(bin())
        .args(["kernels", "--kernel=fundamental", "--s=0.4", "--count=24"])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.join("kernel_table.csv")).unwrap();
    let mut prev = f64::INFINITY;
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let k11: f64 = cols[3].parse().unwrap();
        assert!(k11 < prev, "fundamental solution not decreasing along the ray");
        prev = k11;
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn extend_emits_decreasing_neumann_error() {
    let dir = tmpdir("extend");
    let status = Command::new(bin())
        .args([
            "extend",
            "--n=32",
            "--L=4.0",
            "--s=0.5",
            "--t_min=0.02",
            "--t_max=1.0",
            "--field=random_band",
            "--kmax=2",
        ])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.join("extend_out/levels.csv")).unwrap();
    let rows: Vec<(f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[2].parse().unwrap())
        })
        .collect();
    // error decreases toward small t (rows ascend in t)
    assert!(rows.windows(2).all(|w| w[0].1 <= w[1].1 * 1.2), "{rows:?}");
    assert!(rows[0].1 < rows[rows.len() - 1].1);
    // per-level field files exist and parse
    let first = dir.join("extend_out/level_000.field");
    assert!(first.exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn dirichlet_emits_convergence_csv() {
    let dir = tmpdir("dirichlet");
    let status = Command::new(bin())
        .args(["dirichlet", "--n=32", "--s=0.75", "--mu=1.0", "--lambda=-1.0"])
        .current_dir(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.join("dirichlet_solution.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,cg_iterations,cg_residual,energy,ritz_min,condition");
    assert_eq!(lines.len(), 3); // header + n/2 + n
    assert!(dir.join("dirichlet_solution.field").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn apply_outputs_are_deterministic_across_threads() {
    let dir1 = tmpdir("det1");
    let dir2 = tmpdir("det2");
    for (dir, threads) in [(&dir1, "1"), (&dir2, "8")] {
        let status = Command::new(bin())
            .args([
                "apply",
                "--operator=lame_s",
                "--route=spectral",
                "--s=0.5",
                "--n=32",
                &format!("--threads={threads}"),
            ])
            .current_dir(dir)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(dir1.join("apply_out.field")).unwrap();
    let b = std::fs::read(dir2.join("apply_out.field")).unwrap();
    assert_eq!(a, b, "spectral output differs across thread counts");
    std::fs::remove_dir_all(&dir1).ok();
    std::fs::remove_dir_all(&dir2).ok();
}
