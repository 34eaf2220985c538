use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mhd2d::harness::checkpoint_path;

fn mhd2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhd2d")).args(args).output().unwrap()
}

fn write_config(dir: &Path, t_end: f64) -> String {
    let p = dir.join("run.cfg");
    fs::write(
        &p,
        format!(
            "[grid]\nn1 = 16\nn2 = 16\n[init]\nseed = 3\n[diag]\nsample_interval = 0.05\n\
             [run]\nt_end = {t_end}\ncheckpoint_every = 0.1\n"
        ),
    )
    .unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn simulate_writes_outputs_and_resumes_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 0.2);
    let a = dir.path().join("a");
    let out = mhd2d(&["simulate", "--config", &cfg, "--out", a.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(a.join("diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5);
    assert!(csv.starts_with("t,"));
    let ckpt = checkpoint_path(&a.join("checkpoints"), 0.1);
    assert!(ckpt.exists());

    let b = dir.path().join("b");
    let out = mhd2d(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        b.to_str().unwrap(),
        "--resume",
        ckpt.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(a.join("final.mhd2")).unwrap(), fs::read(b.join("final.mhd2")).unwrap());
}

#[test]
fn bad_config_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.cfg");
    fs::write(&p, "[diag]\nsigma = 0.7\n[run]\nt_end = 1\n").unwrap();
    let out = mhd2d(&["simulate", "--config", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn omega_residual_reports_its_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let out = mhd2d(&["omega-residual", "--out", dir.path().to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("PASS criterion  8"), "{stdout}");
    assert!(dir.path().join("omega_residual.csv").exists());
    assert!(fs::read_to_string(dir.path().join("summary.txt")).unwrap().contains("criterion  8"));
}

#[test]
fn resume_is_only_for_simulate() {
    let out = mhd2d(&["linear-modes", "--resume", "x.mhd2"]);
    assert_eq!(out.status.code(), Some(2));
}
