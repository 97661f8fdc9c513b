//! Parameter sweeps over config files and `--set` overrides.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::config::RunConfig;
use super::execute::{execute, ExecuteOptions};
use crate::error::{Error, Result};

/// One `key=v1,v2,...` override; values are parsed as JSON, falling back to
/// plain strings.
#[derive(Debug, Clone, PartialEq)]
pub struct SetOverride {
    pub key: String,
    pub values: Vec<Value>,
}

impl SetOverride {
    pub fn parse(spec: &str) -> Result<Self> {
        let (key, rest) = spec
            .split_once('=')
            .ok_or_else(|| Error::config("--set", format!("expected key=v1,v2,..., got '{spec}'")))?;
        let key = key.trim();
        if key.is_empty() || key.split('.').any(str::is_empty) {
            return Err(Error::config("--set", format!("bad key '{key}'")));
        }
        let values: Vec<Value> = rest
            .split(',')
            .map(|v| serde_json::from_str(v.trim()).unwrap_or_else(|_| Value::String(v.trim().to_string())))
            .collect();
        Ok(SetOverride {
            key: key.to_string(),
            values,
        })
    }
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| Error::config(key, format!("'{}' is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

fn label(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

/// A named configuration in a sweep. `config` is `Err` when the file or an
/// override is invalid; the sweep records it and carries on.
#[derive(Debug)]
pub struct SweepItem {
    pub name: String,
    pub config: std::result::Result<RunConfig, String>,
}

/// Expands a glob of config files and the Cartesian product of overrides.
pub fn expand(pattern: &str, sets: &[SetOverride]) -> Result<Vec<SweepItem>> {
    let paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| Error::config("--config", format!("bad glob '{pattern}': {e}")))?
        .filter_map(|p| p.ok())
        .filter(|p| p.is_file())
        .collect();
    if paths.is_empty() {
        return Err(Error::config("--config", format!("no config files match '{pattern}'")));
    }
    let mut items = Vec::new();
    for path in paths {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("config").to_string();
        let base: std::result::Result<Value, String> = fs::read_to_string(&path)
            .map_err(|e| Error::io(&path, e).to_string())
            .and_then(|t| serde_json::from_str(&t).map_err(|e| format!("{}: {e}", path.display())));
        let mut combos: Vec<(String, Vec<(&str, &Value)>)> = vec![(stem, Vec::new())];
        for s in sets {
            let mut next = Vec::with_capacity(combos.len() * s.values.len());
            for (name, assigned) in &combos {
                for v in &s.values {
                    let mut a = assigned.clone();
                    a.push((s.key.as_str(), v));
                    next.push((format!("{name}__{}={}", s.key, label(v)), a));
                }
            }
            combos = next;
        }
        for (name, assigned) in combos {
            let config = base.clone().and_then(|mut v| {
                for (k, val) in &assigned {
                    set_path(&mut v, k, (*val).clone()).map_err(|e| e.to_string())?;
                }
                RunConfig::from_json(&v.to_string()).map_err(|e| e.to_string())
            });
            items.push(SweepItem { name, config });
        }
    }
    Ok(items)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub name: String,
    /// `pass`, `fail` or `error`.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub checks: BTreeMap<String, bool>,
    pub metrics: BTreeMap<String, f64>,
}

/// Peak vacuum density of two runs that differ only in the density floor.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaPair {
    pub runs: [String; 2],
    pub delta: [f64; 2],
    pub peak: [f64; 2],
    pub delta_ratio: f64,
    pub peak_ratio: f64,
    /// `peak_ratio` within a factor 1.5 of `delta_ratio`.
    pub proportional: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LifespanRow {
    pub name: String,
    pub gamma: f64,
    pub beta: f64,
    pub t_star: Option<f64>,
    pub scans_monotone: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub runs: Vec<SweepEntry>,
    pub delta_pairs: Vec<DeltaPair>,
    pub lifespans: Vec<LifespanRow>,
}

impl SweepSummary {
    pub fn all_pass(&self) -> bool {
        self.runs.iter().all(|r| r.status == "pass")
    }
}

/// Key grouping runs that differ only in `delta_floor` and output location.
fn delta_group_key(cfg: &RunConfig) -> String {
    let mut c = cfg.clone();
    c.regularization.delta_floor = 0.0;
    c.output.dir = None;
    c.hash()
}

fn delta_pairs(entries: &[SweepEntry], configs: &[Option<&RunConfig>]) -> Vec<DeltaPair> {
    let mut groups: BTreeMap<String, Vec<(f64, f64, &str)>> = BTreeMap::new();
    for (e, c) in entries.iter().zip(configs) {
        let (Some(c), Some(&peak)) = (c, e.metrics.get("peak_in_annulus")) else {
            continue;
        };
        let delta = c.regularization.delta_floor;
        if delta > 0.0 {
            groups.entry(delta_group_key(c)).or_default().push((delta, peak, &e.name));
        }
    }
    let mut pairs = Vec::new();
    for mut g in groups.into_values() {
        g.sort_by(|x, y| y.0.total_cmp(&x.0));
        for w in g.windows(2) {
            let (d1, p1, n1) = w[0];
            let (d2, p2, n2) = w[1];
            let delta_ratio = d1 / d2;
            let peak_ratio = p1 / p2;
            let q = peak_ratio / delta_ratio;
            pairs.push(DeltaPair {
                runs: [n1.to_string(), n2.to_string()],
                delta: [d1, d2],
                peak: [p1, p2],
                delta_ratio,
                peak_ratio,
                proportional: q.is_finite() && (1.0 / 1.5..=1.5).contains(&q),
            });
        }
    }
    pairs
}

/// Runs every item into `out_root/<name>` on `jobs` threads and writes
/// `out_root/sweep_summary.json`.
pub fn run_sweep(items: &[SweepItem], out_root: &Path, jobs: usize, opts: &ExecuteOptions) -> Result<SweepSummary> {
    fs::create_dir_all(out_root).map_err(|e| Error::io(out_root, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    let runs: Vec<SweepEntry> = pool.install(|| {
        items
            .par_iter()
            .map(|item| {
                let mut entry = SweepEntry {
                    name: item.name.clone(),
                    status: "error".into(),
                    error: None,
                    config_hash: None,
                    checks: BTreeMap::new(),
                    metrics: BTreeMap::new(),
                };
                match &item.config {
                    Err(msg) => entry.error = Some(msg.clone()),
                    Ok(cfg) => {
                        entry.config_hash = Some(cfg.hash());
                        match execute(cfg, &out_root.join(&item.name), opts) {
                            Ok(rep) => {
                                entry.status = if rep.passed() { "pass" } else { "fail" }.into();
                                entry.checks = rep.manifest.checks;
                                entry.metrics = rep.manifest.metrics;
                            }
                            Err(e) => entry.error = Some(e.to_string()),
                        }
                    }
                }
                entry
            })
            .collect()
    });
    let configs: Vec<Option<&RunConfig>> = items.iter().map(|i| i.config.as_ref().ok()).collect();
    let delta_pairs = delta_pairs(&runs, &configs);
    let lifespans = runs
        .iter()
        .zip(&configs)
        .filter_map(|(e, c)| {
            let c = (*c)?;
            let monotone = *e.checks.get("blowup_scans_monotone")?;
            Some(LifespanRow {
                name: e.name.clone(),
                gamma: c.law.gamma,
                beta: c.law.beta,
                t_star: e.metrics.get("t_star").copied(),
                scans_monotone: monotone,
            })
        })
        .collect();
    let summary = SweepSummary {
        runs,
        delta_pairs,
        lifespans,
    };
    let path = out_root.join("sweep_summary.json");
    fs::write(&path, serde_json::to_string_pretty(&summary)?).map_err(|e| Error::io(&path, e))?;
    Ok(summary)
}
