use std::path::Path;
use std::process::{Command, Output};

use qmkdv::io::load_trajectory;

fn qmkdv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmkdv"))
        .args(args)
        .env("QMKDV_THREADS", "2")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(qmkdv(&[]).status.code(), Some(2));
    assert_eq!(qmkdv(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(qmkdv(&["simulate", "--dt", "fast"]).status.code(), Some(2));
}

#[test]
fn failed_checks_exit_with_one() {
    let out = qmkdv(&[
        "simulate", "--modes", "16", "--dt", "1e-4", "--tend", "0.002", "--tol", "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn resonance_audit_small_range() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("audit.csv");
    let out = qmkdv(&["resonance-audit", "--max", "3", "--out", path(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("resonance factorization: PASS"), "{stdout}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 7 * 7 * 7);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let csv = dir.path().join(name);
        let out = qmkdv(&[
            "--seed", seed, "split-check", "--modes", "16", "--probes", "3", "--out", path(&csv),
        ]);
        assert_eq!(out.status.code(), Some(0));
        std::fs::read(csv).unwrap()
    };
    let a = run("a.csv", "7");
    let b = run("b.csv", "7");
    let c = run("c.csv", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\nmodes=16\ntend=0.002\ndt=1e-4\nrecord_stride=5\n").unwrap();
    let traj = dir.path().join("t.bin");
    let monitor = dir.path().join("m.csv");
    let out = qmkdv(&[
        "--config",
        path(&cfg),
        "simulate",
        "--tend",
        "0.001",
        "--out",
        path(&traj),
        "--monitor",
        path(&monitor),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let t = load_trajectory(&traj).unwrap();
    assert_eq!(t.snapshots()[0].field.grid().num_modes(), 16);
    let last = t.snapshots().last().unwrap().time;
    assert!((last - 0.001).abs() < 1e-12, "{last}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("hamiltonian conservation: PASS"), "{stdout}");
}

#[test]
fn stored_trajectory_feeds_energy_track() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("t.txt");
    let out = qmkdv(&[
        "simulate", "--modes", "16", "--dt", "1e-4", "--tend", "0.002", "--record-stride", "5",
        "--out", path(&traj), "--monitor", path(&dir.path().join("m.csv")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let energy = dir.path().join("e.csv");
    let out = qmkdv(&["energy-track", "--traj", path(&traj), "--out", path(&energy)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("modified energy tracking: INFO"));
    assert!(std::fs::read_to_string(energy).unwrap().lines().count() > 2);
}

#[test]
fn counterexample_exponent_for_the_primary_family() {
    let out = qmkdv(&["counterexample", "--variant", "1", "--b", "0.5", "--nmax", "128"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trilinear counterexample exponent: PASS"));
}
