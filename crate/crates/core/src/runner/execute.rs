//! Runs one configuration and writes its output directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{RunConfig, ScenarioSpec};
use super::snapshot::write_snapshots;
use crate::blowup::blowup_report;
use crate::diagnostics::{
    annulus_velocity_check, default_eps_vac, detect_jumps, energy_report, lambda_jump_decay,
    particle_ode_residual, two_fluid_energy_balance, vacuum_report, CheckEntry, CheckSummary,
};
use crate::diagnostics::jumps::jumps_csv;
use crate::error::{Error, Result};
use crate::flow::{
    integrate_path, ordering_check, track_interfaces, write_interfaces_csv, write_path_csv, Geometry, RadialHistory,
};
use crate::format::CsvTable;
use crate::radial::{run, RunOptions, RunOutput};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default)]
pub struct ExecuteOptions {
    /// Overrides `time.snapshot_every`.
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub code_version: String,
    pub scheme: String,
    pub scenario: String,
    /// Relative paths of every file written, sorted.
    pub files: Vec<String>,
    pub checks: BTreeMap<String, bool>,
    /// Scalar results used by sweeps.
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: CheckSummary,
    pub manifest: RunManifest,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.summary.all_pass()
    }
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Writer<'_> {
    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        self.text(name, &table.render())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.text(name, &serde_json::to_string_pretty(value)?)
    }
}

/// Largest `|M(t) - M(0)| / M(0)` over the snapshots.
pub fn mass_drift(out: &RunOutput) -> f64 {
    let m0 = out.log.mass[0];
    let scale = if m0 > 0.0 { m0 } else { 1.0 };
    out.log.mass.iter().fold(0.0f64, |m, x| m.max((x - m0).abs() / scale))
}

/// Largest deviation of any snapshot from the initial state.
pub fn static_deviation(out: &RunOutput) -> f64 {
    let s0 = out.initial();
    out.snapshots.iter().fold(0.0f64, |m, st| {
        let dr = st.rho.iter().zip(&s0.rho).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        let dv = st.v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        m.max(dr).max(dv)
    })
}

/// Runs `cfg`, evaluates its diagnostics and writes everything under `dir`.
pub fn execute(cfg: &RunConfig, dir: &Path, opts: &ExecuteOptions) -> Result<RunReport> {
    cfg.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let scn = cfg.scenario();
    let law = cfg.law;
    let on = cfg.enabled();
    let tol = &cfg.diagnostics.tolerances;
    let out = run(
        &scn,
        &RunOptions {
            snapshot_every: opts.snapshot_every.unwrap_or_else(|| cfg.time.effective_snapshot_every()),
            snapshot_dt: cfg.time.snapshot_dt,
            record_energy: on.energy,
            max_wall_seconds: None,
        },
    )?;

    let mut w = Writer { dir, files: Vec::new() };
    let mut summary = CheckSummary::default();
    let mut metrics = BTreeMap::new();
    let mut notes = Vec::new();

    w.text("config.json", &cfg.to_json())?;
    w.json("run_log.json", &out.log)?;
    let p_far = law.p(scn.far_field_density());
    w.files.extend(write_snapshots(dir, &out.snapshots, &law, p_far)?);

    summary.insert("mass_drift", CheckEntry::at_most(mass_drift(&out), tol.mass_drift));
    if scn.delta_floor > 0.0 {
        summary.insert("clipped_cells", CheckEntry::at_most(out.log.clipped_total as f64, 0.0));
    }
    if matches!(cfg.scenario, ScenarioSpec::Static { .. }) {
        summary.insert(
            "static_invariance",
            CheckEntry::at_most(static_deviation(&out), tol.static_invariance),
        );
    }

    if on.energy {
        let rep = energy_report(&out, &law)?;
        w.csv("energy_report.csv", &rep.to_csv())?;
        summary.insert("energy_excess", CheckEntry::at_most(rep.max_relative_excess, tol.energy_excess));
        metrics.insert("energy_residual_rate".into(), rep.max_residual_rate);
    }

    if on.jumps {
        let mut records = Vec::new();
        for st in &out.snapshots {
            let scan = detect_jumps(st, &law, cfg.diagnostics.kappa)?;
            records.extend(scan.jumps);
            notes.extend(scan.notes.into_iter().map(|n| format!("t={}: {n}", st.t)));
        }
        w.csv("jumps.csv", &jumps_csv(&records))?;
    }

    if on.decay {
        let ScenarioSpec::Jump { r_jump, .. } = cfg.scenario else {
            unreachable!("validated");
        };
        let cmp = lambda_jump_decay(&out, &law, r_jump, cfg.diagnostics.decay_kappa)?;
        w.csv("lambda_decay.csv", &cmp.to_csv())?;
        summary.insert("decay_max_deviation", CheckEntry::at_most(cmp.max_deviation, tol.decay));
        if let Some(t) = cmp.truncated_at {
            notes.push(format!("decay comparison truncated at t={t}"));
        }
    }

    let needs_history = on.vacuum
        || on.annulus
        || on.two_fluid
        || !cfg.diagnostics.particle_seeds.is_empty()
        || !cfg.diagnostics.ordering_seeds.is_empty();
    let history = if needs_history {
        Some(RadialHistory::new(out.snapshots.clone())?)
    } else {
        None
    };
    let t_end = out.last().t;

    if let (Some(hist), Some((a, b))) = (&history, cfg.annulus()) {
        let track = track_interfaces(hist, a, b, t_end)?;
        let path = dir.join("interfaces.csv");
        write_interfaces_csv(&path, &track)?;
        w.files.push("interfaces.csv".into());
        if let Some(tc) = track.collision {
            notes.push(format!("interfaces meet at t={tc}"));
            metrics.insert("collision_time".into(), tc);
        }
        let eps = cfg.diagnostics.eps_vac.unwrap_or_else(|| default_eps_vac(scn.delta_floor));
        if on.vacuum {
            let rep = vacuum_report(&out, &law, &track, Some(eps))?;
            w.csv("vacuum_report.csv", &rep.to_csv())?;
            summary.insert(
                "vacuum_containment_cells",
                CheckEntry::at_most(rep.max_excursion(), tol.containment_cells),
            );
            metrics.insert("peak_in_annulus".into(), rep.peak_in_annulus());
        }
        if on.annulus {
            let mut table = CsvTable::new(&[
                "t",
                "a",
                "b",
                "alpha",
                "beta",
                "rms_rel",
                "stress_rate",
                "interface_rate",
                "rel_diff",
            ]);
            let (mut rms, mut rel) = (0.0f64, 0.0f64);
            for st in &out.snapshots {
                let Some((at, bt)) = track.at(st.t) else { break };
                if let Some(fit) = annulus_velocity_check(st, at, bt, eps)? {
                    rms = rms.max(fit.rms_rel());
                    rel = rel.max(fit.rel_diff);
                    table.push(vec![
                        fit.t,
                        fit.a,
                        fit.b,
                        fit.alpha,
                        fit.beta,
                        fit.rms_rel(),
                        fit.stress_rate,
                        fit.interface_rate,
                        fit.rel_diff,
                    ]);
                }
            }
            if table.rows.is_empty() {
                return Err(Error::Unsupported(
                    "annulus fit needs at least a few vacuum cells; refine the grid".into(),
                ));
            }
            w.csv("annulus_fit.csv", &table)?;
            summary.insert("annulus_fit_rms", CheckEntry::at_most(rms, tol.annulus_rms));
            summary.insert("annulus_rate_rel", CheckEntry::at_most(rel, tol.annulus_rel));
        }
        if on.two_fluid {
            let d = &cfg.diagnostics;
            let rec = two_fluid_energy_balance(&out, &law, &track, d.two_fluid_window, d.two_fluid_half_width)?;
            w.csv("two_fluid.csv", &rec.to_csv())?;
            summary.insert("two_fluid_residual", CheckEntry::at_most(rec.max_rel_residual, tol.two_fluid));
            if let Some(t) = rec.truncated_at {
                notes.push(format!("two-fluid balance truncated at t={t}"));
            }
        }
    }

    if let Some(hist) = &history {
        let vacuum_below = if scn.delta_floor > 0.0 { default_eps_vac(scn.delta_floor) } else { 0.0 };
        let t0 = out.initial().t;
        for (j, &r) in cfg.diagnostics.particle_seeds.iter().enumerate() {
            let path = integrate_path(hist, [r, 0.0], t0, t_end)?;
            let name = format!("paths/path_{j:02}.csv");
            let full = dir.join(&name);
            fs::create_dir_all(dir.join("paths")).map_err(|e| Error::io(dir, e))?;
            write_path_csv(&full, &path, Geometry::Radial)?;
            w.files.push(name);
            let rec = particle_ode_residual(&out, &path, &law, vacuum_below)?;
            w.csv(&format!("particle_ode_{j:02}.csv"), &rec.to_csv())?;
            metrics.insert(format!("particle_l2_{j:02}"), rec.l2);
        }
        if !cfg.diagnostics.ordering_seeds.is_empty() {
            let rep = ordering_check(hist, &cfg.diagnostics.ordering_seeds, t_end)?;
            w.json("ordering.json", &rep)?;
            summary.insert(
                "flow_ordering",
                CheckEntry {
                    value: rep.min_gap,
                    tolerance: 0.0,
                    pass: rep.ordered(),
                },
            );
        }
    }

    if on.blowup {
        let rep = blowup_report(&law, Some(&out), None)?;
        w.json("blowup_report.json", &rep)?;
        if let Some(m) = &rep.margin {
            w.csv("blowup_margin.csv", &m.to_csv())?;
            w.csv("blowup_H.csv", &m.h_csv())?;
            summary.insert("blowup_margin", CheckEntry::at_least(m.min_margin + m.defect, 0.0));
            metrics.insert("min_margin".into(), m.min_margin);
            metrics.insert("margin_defect".into(), m.defect);
        }
        let monotone = rep.scans.iter().filter(|s| s.monotone).count();
        summary.insert(
            "blowup_scans_monotone",
            CheckEntry::at_least(monotone as f64, rep.scans.len() as f64),
        );
        if let Some(t) = rep.lifespan.t_star {
            metrics.insert("t_star".into(), t);
        }
    }

    metrics.insert("delta_floor".into(), scn.delta_floor);
    metrics.insert("t_end".into(), t_end);
    w.json("summary.json", &summary)?;
    w.files.sort();
    let manifest = RunManifest {
        config_hash: cfg.hash(),
        code_version: CODE_VERSION.into(),
        scheme: out.log.scheme.clone(),
        scenario: cfg.scenario.kind().into(),
        files: w.files.clone(),
        checks: summary.checks.iter().map(|(k, v)| (k.clone(), v.pass)).collect(),
        metrics,
        notes,
    };
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_string_pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(RunReport { summary, manifest })
}
