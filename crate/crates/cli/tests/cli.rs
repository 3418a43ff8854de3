use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nrlimit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrlimit")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const MINIMAL: &str = r#"{
  "n": 8,
  "eps": [0.5],
  "t_final": 0.1,
  "dt": 0.01,
  "regime": "thm3",
  "data": { "family": "zero" }
}
"#;

fn csv_column(text: &str, name: &str) -> Vec<f64> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

fn manifest_without_clock(dir: &Path) -> serde_json::Value {
    let mut m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    for s in m["stages"].as_array_mut().unwrap() {
        s["wall_seconds"] = serde_json::Value::Null;
    }
    m
}

#[test]
fn minimal_run_gives_zero_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "min.json", MINIMAL);
    let out = tmp.path().join("run");
    let o = nrlimit(&["run-dm", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').skip(2).map(|x| x.parse().unwrap()).collect();
        assert!(v.iter().all(|x| *x == 0.0), "{line}");
    }
    for f in ["psi_e0_t0.fld", "psi_e0_final.fld", "a_e0_final.fld", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn stationary_charge_is_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = MINIMAL.replace(
        r#""data": { "family": "zero" }"#,
        r#""data": { "family": "stationary", "plus": { "amplitude": 1.0, "width": 1.0, "spin": [[1.0, 0.0], [0.0, 0.0]] } }"#,
    );
    let cfg = write(tmp.path(), "st.json", &cfg);
    let out = tmp.path().join("run");
    let o = nrlimit(&["run-dm", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let q = csv_column(&fs::read_to_string(out.join("diagnostics.csv")).unwrap(), "charge");
    assert!(q[0] > 0.0);
    assert!(q.iter().all(|x| (x - q[0]).abs() < 1e-10));
}

#[test]
fn odd_grid_is_rejected_with_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "odd.json", &MINIMAL.replace("\"n\": 8", "\"n\": 7"));
    let o = nrlimit(&["run-dm", "--config", &cfg, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("`n`"), "{err}");
}

#[test]
fn syntax_errors_carry_a_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", &MINIMAL.replace("\"t_final\": 0.1,", "\"t_final\": ,"));
    let o = nrlimit(&["run-dm", "--config", &cfg]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn converge_needs_three_eps() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "two.json", &MINIMAL.replace("[0.5]", "[0.5, 0.25]"));
    let o = nrlimit(&["converge", "--config", &cfg, "--out", tmp.path().join("x").to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 3"));
}

#[test]
fn zero_preset_reports_undefined_rates() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("z");
    let o = nrlimit(&["converge", "--preset", "zero", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("rate_report.json")).unwrap()).unwrap();
    assert_eq!(r["h1_spinor_rate"], "undefined");
    assert!(r["errors"]["h1_spinor"].as_array().unwrap().iter().all(|v| v.as_f64() == Some(0.0)));
}

#[test]
fn single_cell_probe_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "p.json",
        r#"{ "case": "iii", "n": 16, "eps": 0.5, "cells": [[1, 1]], "trials": 1, "seed": 3, "t_final": 0.5 }"#,
    );
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let o = nrlimit(&["probe-dyadic", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let csv = fs::read(a.join("sweep.csv")).unwrap();
    assert_eq!(String::from_utf8_lossy(&csv).lines().count(), 2);
    assert_eq!(csv, fs::read(b.join("sweep.csv")).unwrap());
    assert_eq!(manifest_without_clock(&a), manifest_without_clock(&b));
}

#[test]
fn check_suites_report_and_fail_on_unknown() {
    let o = nrlimit(&["check", "matrices"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().filter(|l| l.starts_with("PASS")).count(), 3);
    assert!(!nrlimit(&["check", "no-such-suite"]).status.success());
}

#[test]
fn sp_and_pauli_runs_write_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "min.json", MINIMAL);
    for (cmd, file) in [("run-sp", "v_plus_final.fld"), ("run-pauli", "chi_e0_final.fld")] {
        let out = tmp.path().join(cmd);
        let o = nrlimit(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap(), "--dealias"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join(file).exists());
        let m = manifest_without_clock(&out);
        assert_eq!(m["dealias"], true);
    }
}
