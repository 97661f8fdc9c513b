//! Output contract of config-driven runs.

use std::fs;
use std::path::Path;

use viscoflux::runner::{execute, expand, run_sweep, ExecuteOptions, RunConfig, SetOverride};

const ANNULUS: &str = r#"{
    "schema_version": 1,
    "scenario": {"kind": "vacuum_annulus", "a": 1.0, "b": 2.0, "inner": 2.0, "outer": 1.0},
    "grid": {"r_max": 8.0, "n_cells": 256},
    "time": {"T": 0.05, "snapshot_dt": 0.005},
    "regularization": {"delta_floor": 1e-4},
    "scheme": "imex-superbee",
    "diagnostics": {"two_fluid_window": 0.05}
}"#;

const PULSE: &str = r#"{
    "schema_version": 1,
    "scenario": {"kind": "synthetic_field",
                 "density": {"kind": "uniform", "rho": 1.0},
                 "velocity": {"kind": "gaussian", "amplitude": 0.2, "center": 1.0, "width": 0.25}},
    "grid": {"r_max": 4.0, "n_cells": 64},
    "time": {"T": 0.05, "snapshot_dt": 0.01},
    "diagnostics": {"particle_seeds": [0.5, 1.0]}
}"#;

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn annulus_manifest_lists_vacuum_outputs() {
    let cfg = RunConfig::from_json(ANNULUS).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let rep = execute(&cfg, dir.path(), &ExecuteOptions::default()).unwrap();
    let listed = &rep.manifest.files;
    assert!(dir.path().join("manifest.json").is_file());
    for name in ["vacuum_report.csv", "interfaces.csv", "two_fluid.csv", "config.json"] {
        assert!(listed.iter().any(|f| f == name), "{name} missing from {listed:?}");
    }
    for f in listed {
        assert!(dir.path().join(f).is_file(), "{f} listed but absent");
    }
    let on_disk: Vec<String> = files(dir.path()).into_iter().map(|(n, _)| n).collect();
    for f in on_disk.iter().filter(|f| *f != "manifest.json") {
        assert!(listed.contains(f), "{f} written but not listed");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = RunConfig::from_json(PULSE).unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = execute(&cfg, a.path(), &ExecuteOptions::default()).unwrap();
    execute(&cfg, b.path(), &ExecuteOptions::default()).unwrap();
    assert!(ra.passed());
    assert_eq!(files(a.path()), files(b.path()));
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let src = tempfile::tempdir().unwrap();
    fs::write(src.path().join("pulse.json"), PULSE).unwrap();
    let pattern = format!("{}/*.json", src.path().display());
    let sets = vec![SetOverride::parse("grid.n_cells=32,64,128").unwrap()];
    let items = expand(&pattern, &sets).unwrap();
    assert_eq!(items.len(), 3);
    let one = tempfile::tempdir().unwrap();
    let many = tempfile::tempdir().unwrap();
    let s1 = run_sweep(&items, one.path(), 1, &ExecuteOptions::default()).unwrap();
    run_sweep(&items, many.path(), 3, &ExecuteOptions::default()).unwrap();
    assert!(s1.all_pass());
    assert_eq!(files(one.path()), files(many.path()));
}

#[test]
fn sweep_records_bad_items_and_carries_on() {
    let src = tempfile::tempdir().unwrap();
    fs::write(src.path().join("pulse.json"), PULSE).unwrap();
    let pattern = format!("{}/*.json", src.path().display());
    let sets = vec![SetOverride::parse("grid.n_cells=64,-1").unwrap()];
    let items = expand(&pattern, &sets).unwrap();
    let out = tempfile::tempdir().unwrap();
    let s = run_sweep(&items, out.path(), 2, &ExecuteOptions::default()).unwrap();
    let status: Vec<&str> = s.runs.iter().map(|r| r.status.as_str()).collect();
    assert_eq!(status, vec!["pass", "error"]);
    assert!(out.path().join("sweep_summary.json").is_file());
}
