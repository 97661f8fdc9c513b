//! Time integration driver.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::integrals::{dissipation_rate, kinetic_energy, potential_energy, Potential};
use super::mollify::mollify_initial;
use super::scenario::Scenario;
use super::scheme::make_scheme;
use super::state::RadialState;
use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunOptions {
    /// Store a snapshot every this many steps (0 disables step-based output).
    pub snapshot_every: usize,
    /// Also land exactly on multiples of this interval and snapshot there.
    pub snapshot_dt: Option<f64>,
    /// Record kinetic/potential energy and dissipation before every step.
    pub record_energy: bool,
    pub max_wall_seconds: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            snapshot_every: 100,
            snapshot_dt: None,
            record_energy: false,
            max_wall_seconds: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySample {
    pub t: f64,
    /// Step taken from this state; zero for the final sample.
    pub dt: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub dissipation: f64,
}

impl EnergySample {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunLog {
    pub scheme: String,
    pub steps: usize,
    pub dt_history: Vec<f64>,
    pub clipped_total: usize,
    pub snapshot_times: Vec<f64>,
    pub min_density: Vec<f64>,
    pub max_density: Vec<f64>,
    pub mass: Vec<f64>,
    /// `max |rho - rho_far|` over the outer 5% of cells, per snapshot.
    pub outer_activity: Vec<f64>,
    pub potential: Option<Potential>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub energy: Vec<EnergySample>,
    /// Set when the wall-clock budget stopped the run before `t_end`.
    pub partial: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scenario: Scenario,
    pub snapshots: Vec<RadialState>,
    pub log: RunLog,
}

impl RunOutput {
    pub fn initial(&self) -> &RadialState {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &RadialState {
        self.snapshots.last().expect("run output always holds the initial state")
    }

    /// Snapshot whose time is closest to `t`.
    pub fn nearest(&self, t: f64) -> &RadialState {
        self.snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().partial_cmp(&(b.t - t).abs()).unwrap())
            .unwrap()
    }

    pub fn potential(&self) -> Potential {
        potential_for(&self.scenario)
    }
}

pub fn potential_for(scn: &Scenario) -> Potential {
    if scn.is_compact_support() {
        Potential::Absolute
    } else {
        Potential::Relative
    }
}

/// Integrates a scenario from its mollified initial data to `t_end`.
pub fn run(scn: &Scenario, opts: &RunOptions) -> Result<RunOutput> {
    scn.validate()?;
    let scheme = make_scheme(&scn.scheme)?;
    let law = &scn.law;
    let pot = potential_for(scn);
    let rho_far = scn.far_field_density();
    let started = Instant::now();

    let mut st = mollify_initial(scn)?;
    let mut log = RunLog {
        scheme: scheme.name().to_string(),
        potential: Some(pot),
        ..Default::default()
    };
    let mut snapshots = Vec::new();
    let record = |st: &RadialState, log: &mut RunLog, snaps: &mut Vec<RadialState>| {
        log.snapshot_times.push(st.t);
        log.min_density.push(st.min_density());
        log.max_density.push(st.max_density());
        log.mass.push(st.mass());
        log.outer_activity.push(st.outer_activity(rho_far));
        snaps.push(st.clone());
    };
    record(&st, &mut log, &mut snapshots);

    let t_end = scn.t_end;
    let eps = 1e-12 * t_end.max(1.0);
    while st.t < t_end - eps {
        if let Some(budget) = opts.max_wall_seconds {
            if started.elapsed().as_secs_f64() > budget {
                log.partial = true;
                break;
            }
        }
        let mut dt = scheme.stable_dt(&st, law, scn.cfl_safety)?;
        let mut target = None;
        if dt >= t_end - st.t - eps {
            dt = t_end - st.t;
            target = Some(t_end);
        }
        let mut on_interval = false;
        if let Some(h) = opts.snapshot_dt {
            let next = ((st.t + eps) / h).floor() * h + h;
            if next < t_end - eps && st.t + dt >= next - eps {
                dt = next - st.t;
                target = Some(next);
                on_interval = true;
            }
        }

        if opts.record_energy {
            log.energy.push(EnergySample {
                t: st.t,
                dt,
                kinetic: kinetic_energy(&st),
                potential: potential_energy(&st, law, pot),
                dissipation: dissipation_rate(&st, law),
            });
        }

        let (mut next, stats) = scheme.step(&st, law, dt)?;
        if let Some(t) = target {
            next.t = t;
        }
        log.steps += 1;
        log.dt_history.push(dt);
        log.clipped_total += stats.clipped;
        st = next;

        let by_steps = opts.snapshot_every > 0 && log.steps.is_multiple_of(opts.snapshot_every);
        let at_end = st.t >= t_end - eps;
        if by_steps || on_interval || at_end {
            record(&st, &mut log, &mut snapshots);
        }
    }
    if log.partial && snapshots.last().map(|s| s.t) != Some(st.t) {
        record(&st, &mut log, &mut snapshots);
    }
    if opts.record_energy {
        log.energy.push(EnergySample {
            t: st.t,
            dt: 0.0,
            kinetic: kinetic_energy(&st),
            potential: potential_energy(&st, law, pot),
            dissipation: dissipation_rate(&st, law),
        });
    }

    Ok(RunOutput {
        scenario: scn.clone(),
        snapshots,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::MaterialLaw;
    use crate::radial::grid::RadialGrid;
    use crate::radial::profile::DensityProfile;

    #[test]
    fn static_run_keeps_initial_state() {
        let law = MaterialLaw::default();
        let scn = Scenario {
            t_end: 0.05,
            ..Scenario::new(law, RadialGrid::new(4.0, 32).unwrap())
        };
        let out = run(&scn, &RunOptions { snapshot_every: 10, ..Default::default() }).unwrap();
        assert!(out.snapshots.len() > 2);
        assert_eq!(out.last().t, 0.05);
        for s in &out.snapshots {
            assert_eq!(s.rho, out.initial().rho);
            assert_eq!(s.v, out.initial().v);
        }
    }

    #[test]
    fn snapshot_interval_is_hit_exactly() {
        let law = MaterialLaw::default();
        let scn = Scenario {
            t_end: 0.02,
            density: DensityProfile::step(1.0, 2.0, 1.0),
            ..Scenario::new(law, RadialGrid::new(4.0, 32).unwrap())
        };
        let opts = RunOptions {
            snapshot_every: 0,
            snapshot_dt: Some(0.005),
            ..Default::default()
        };
        let out = run(&scn, &opts).unwrap();
        let times: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times.len(), 5);
        for (j, t) in times.iter().enumerate() {
            assert!((t - 0.005 * j as f64).abs() < 1e-15, "{times:?}");
        }
    }

    #[test]
    fn runs_are_bit_reproducible() {
        let law = MaterialLaw::default();
        let scn = Scenario {
            t_end: 0.01,
            density: DensityProfile::step(1.0, 2.0, 1.0),
            ..Scenario::new(law, RadialGrid::new(4.0, 64).unwrap())
        };
        let a = run(&scn, &RunOptions::default()).unwrap();
        let b = run(&scn, &RunOptions::default()).unwrap();
        assert_eq!(a.last(), b.last());
        assert_eq!(a.log.dt_history, b.log.dt_history);
    }
}
