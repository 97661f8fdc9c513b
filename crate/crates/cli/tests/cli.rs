use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const STATIC: &str = r#"{
    "schema_version": 1,
    "scenario": {"kind": "static"},
    "grid": {"r_max": 4.0, "n_cells": 64},
    "time": {"T": 0.05, "snapshot_dt": 0.01}
}"#;

const GAMMA_ONE_BLOWUP: &str = r#"{
    "schema_version": 1,
    "law": {"gamma": 1.0},
    "scenario": {"kind": "compact_support",
                 "density": {"kind": "bump", "amplitude": 1.0, "radius": 1.0, "power": 2.0}},
    "grid": {"r_max": 3.0, "n_cells": 64},
    "time": {"T": 0.05},
    "diagnostics": {"blowup": true}
}"#;

fn viscoflux(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_viscoflux"))
        .args(args)
        .env_remove("VISCOFLUX_JOBS")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn static_run_passes_and_creates_nested_output() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "static.json", STATIC);
    let out = tmp.path().join("a/b/c");
    let o = viscoflux(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let checks = manifest["checks"].as_object().unwrap();
    assert!(checks.contains_key("static_invariance"));
    assert!(checks.values().all(|v| v == true));
}

#[test]
fn output_dir_can_come_from_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("from_cfg");
    let text = STATIC.replace(
        "\"time\"",
        &format!("\"output\": {{\"dir\": {:?}}}, \"time\"", dir.display().to_string()),
    );
    let cfg = write(tmp.path(), "static.json", &text);
    let o = viscoflux(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.join("manifest.json").is_file());
}

#[test]
fn gamma_one_blowup_exits_2_naming_the_hypothesis() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "g1.json", GAMMA_ONE_BLOWUP);
    let o = viscoflux(&["run", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gamma > 1"), "{}", stderr(&o));
}

#[test]
fn misspelled_key_exits_2_naming_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", &STATIC.replace("\"n_cells\"", "\"n_cels\""));
    let o = viscoflux(&["run", "--config", &cfg, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid.n_cels"), "{}", stderr(&o));
}

#[test]
fn empty_glob_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let pat = format!("{}/*.json", tmp.path().display());
    let o = viscoflux(&["sweep", "--config", &pat, "--out", tmp.path().join("s").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_pairs_delta_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let annulus = r#"{
        "schema_version": 1,
        "scenario": {"kind": "vacuum_annulus", "a": 1.0, "b": 2.0, "inner": 2.0, "outer": 1.0},
        "grid": {"r_max": 8.0, "n_cells": 256},
        "time": {"T": 0.05, "snapshot_dt": 0.005},
        "regularization": {"delta_floor": 1e-4},
        "scheme": "imex",
        "diagnostics": {"two_fluid": false}
    }"#;
    let cfg = write(tmp.path(), "annulus.json", annulus);
    let out = tmp.path().join("sweep");
    let o = Command::new(env!("CARGO_BIN_EXE_viscoflux"))
        .args(["sweep", "--config", &cfg, "--out", out.to_str().unwrap()])
        .args(["--set", "regularization.delta_floor=1e-4,5e-5"])
        .env("VISCOFLUX_JOBS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("sweep_summary.json")).unwrap()).unwrap();
    let pair = &s["delta_pairs"][0];
    assert_eq!(pair["proportional"], true);
    assert!((pair["delta_ratio"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn paths_and_blowup_on_a_finished_run() {
    let tmp = tempfile::tempdir().unwrap();
    let bump = r#"{
        "schema_version": 1,
        "law": {"gamma": 3.0, "beta": 2.0, "mu": 0.1},
        "scenario": {"kind": "compact_support",
                     "density": {"kind": "bump", "amplitude": 1.0, "radius": 1.0, "power": 2.0}},
        "grid": {"r_max": 3.0, "n_cells": 128},
        "time": {"T": 0.05, "snapshot_dt": 0.01},
        "scheme": "imex"
    }"#;
    let cfg = write(tmp.path(), "bump.json", bump);
    let run = tmp.path().join("run");
    let o = viscoflux(&["run", "--config", &cfg, "--out", run.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let paths = tmp.path().join("paths");
    let o = viscoflux(&["paths", "--run", run.to_str().unwrap(), "--out", paths.to_str().unwrap(), "--seeds", "0.3,0.6,0.9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(paths.join("paths/path_02.csv").is_file());
    assert!(paths.join("ordering.json").is_file());
    let blow = tmp.path().join("blow");
    let o = viscoflux(&["blowup", "--config", run.to_str().unwrap(), "--out", blow.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(blow.join("blowup_report.json").is_file());
    assert!(blow.join("blowup_margin.csv").is_file());
}

#[test]
fn blowup_from_parameters_reproduces_the_disk_lifespan() {
    let tmp = tempfile::tempdir().unwrap();
    let pi = std::f64::consts::PI;
    let params = format!(
        r#"{{"schema_version": 1, "law": {{"gamma": 2.0, "beta": 2.0}}, "h0": {}, "mass0": {pi}, "area0": {pi}}}"#,
        2.5 * pi
    );
    let p = write(tmp.path(), "disk.json", &params);
    let out = tmp.path().join("o");
    let o = viscoflux(&["blowup", "--config", &p, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("blowup_report.json")).unwrap()).unwrap();
    let t = rep["lifespan"]["t_star"].as_f64().unwrap();
    assert!((t - (5f64.sqrt() / 2.0 - 1.0)).abs() < 1e-12);
}

#[test]
fn check_runs_selected_criteria_and_creates_its_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("missing/report");
    let o = viscoflux(&["check", "--only", "3,4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    assert!(out.join("check_report.txt").is_file());
}
