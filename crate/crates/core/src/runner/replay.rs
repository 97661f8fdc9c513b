//! Commands that work on a finished run directory or on bare parameters.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{RunConfig, SCHEMA_VERSION};
use super::snapshot::{list_snapshots, read_snapshot};
use crate::blowup::{blowup_report, BlowupReport, LifespanInput};
use crate::error::{Error, Result};
use crate::flow::{
    integrate_path, ordering_check, track_interfaces, write_interfaces_csv, write_path_csv, Geometry, OrderingReport,
    RadialHistory,
};
use crate::format::CsvTable;
use crate::material::MaterialLaw;
use crate::radial::{RunLog, RunOutput};

/// Rebuilds a run from `config.json` and the snapshot files of `dir`.
pub fn load_run_dir(dir: &Path) -> Result<(RunConfig, RunOutput)> {
    let cfg = RunConfig::load(&dir.join("config.json"))?;
    let grid = cfg.grid;
    let delta = cfg.regularization.delta_floor;
    let snapshots = list_snapshots(dir)?
        .iter()
        .map(|p| read_snapshot(p, grid, delta))
        .collect::<Result<Vec<_>>>()?;
    let out = RunOutput {
        scenario: cfg.scenario(),
        snapshots,
        log: RunLog::default(),
    };
    Ok((cfg, out))
}

#[derive(Debug, Clone, Serialize)]
pub struct PathsReport {
    pub seeds: Vec<f64>,
    pub ordering: OrderingReport,
    pub files: Vec<String>,
}

/// Seeds used when none are given: the configured ones, else eight evenly
/// spaced radii in the inner half of the domain.
pub fn default_seeds(cfg: &RunConfig) -> Vec<f64> {
    let mut s: Vec<f64> = cfg
        .diagnostics
        .ordering_seeds
        .iter()
        .chain(&cfg.diagnostics.particle_seeds)
        .copied()
        .collect();
    if s.is_empty() {
        let h = 0.5 * cfg.grid.r_max / 8.0;
        s = (1..=8).map(|k| k as f64 * h).collect();
    }
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

/// Integrates particle paths (and the interfaces of an annulus run) through
/// the stored velocities of `run_dir`; writes into `out_dir`.
pub fn paths_command(run_dir: &Path, out_dir: &Path, seeds: Option<Vec<f64>>) -> Result<PathsReport> {
    let (cfg, out) = load_run_dir(run_dir)?;
    let seeds = seeds.unwrap_or_else(|| default_seeds(&cfg));
    if seeds.is_empty() || seeds.iter().any(|r| !(*r > 0.0 && *r < cfg.grid.r_max)) {
        return Err(Error::config("seeds", "need at least one seed inside (0, r_max)"));
    }
    let (t0, t1) = (out.initial().t, out.last().t);
    let hist = RadialHistory::new(out.snapshots)?;
    let sub = out_dir.join("paths");
    fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
    let mut files = Vec::new();
    for (j, &r) in seeds.iter().enumerate() {
        let p = integrate_path(&hist, [r, 0.0], t0, t1)?;
        let name = format!("paths/path_{j:02}.csv");
        write_path_csv(&out_dir.join(&name), &p, Geometry::Radial)?;
        files.push(name);
    }
    if let Some((a, b)) = cfg.annulus() {
        let track = track_interfaces(&hist, a, b, t1)?;
        write_interfaces_csv(&out_dir.join("interfaces.csv"), &track)?;
        files.push("interfaces.csv".into());
    }
    let ordering = ordering_check(&hist, &seeds, t1)?;
    let rep = PathsReport { seeds, ordering, files };
    let path = out_dir.join("ordering.json");
    fs::write(&path, serde_json::to_string_pretty(&rep)?).map_err(|e| Error::io(&path, e))?;
    Ok(rep)
}

/// Parameter file for a blow-up report without a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupParams {
    pub schema_version: u32,
    #[serde(default)]
    pub law: MaterialLaw,
    pub h0: f64,
    pub mass0: f64,
    pub area0: f64,
}

impl BlowupParams {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let p: BlowupParams = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::config(e.path().to_string(), e.into_inner().to_string()))?;
        if p.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", p.schema_version),
            ));
        }
        p.law.validate()?;
        p.input().validate()?;
        Ok(p)
    }

    pub fn input(&self) -> LifespanInput {
        LifespanInput {
            h0: self.h0,
            mass0: self.mass0,
            area0: self.area0,
        }
    }
}

/// Blow-up report from a compact-support run directory or a parameter file.
pub fn blowup_command(input: &Path, out_dir: &Path) -> Result<BlowupReport> {
    let rep = if input.is_dir() {
        let (cfg, out) = load_run_dir(input)?;
        blowup_report(&cfg.law, Some(&out), None)?
    } else {
        let text = fs::read_to_string(input).map_err(|e| Error::io(input, e))?;
        let p = BlowupParams::from_json(&text)?;
        blowup_report(&p.law, None, Some(p.input()))?
    };
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let write = |name: &str, text: String| -> Result<()> {
        let path = out_dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };
    write("blowup_report.json", serde_json::to_string_pretty(&rep)?)?;
    let mut g = CsvTable::new(&["t", "G"]);
    for (t, v) in rep.lifespan.curve_t.iter().zip(&rep.lifespan.curve_g) {
        g.push(vec![*t, *v]);
    }
    write("blowup_G.csv", g.render())?;
    if let Some(m) = &rep.margin {
        write("blowup_margin.csv", m.to_csv().render())?;
        write("blowup_H.csv", m.h_csv().render())?;
    }
    Ok(rep)
}
