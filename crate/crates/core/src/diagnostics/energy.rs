//! Kinetic, potential and dissipated energy of a radial run.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::CsvTable;
use crate::material::MaterialLaw;
use crate::radial::integrals::{dissipation_rate, kinetic_energy, potential_energy, Potential};
use crate::radial::run::{potential_for, EnergySample, RunOutput};
use crate::radial::make_scheme;

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub potential_kind: Potential,
    pub times: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub potential: Vec<f64>,
    pub dissipation: Vec<f64>,
    /// Running sum of the dissipation terms of `balance_residual`.
    pub cumulative_dissipation: Vec<f64>,
    /// Weight `theta` of the end-of-step dissipation, from the scheme.
    pub implicit_fraction: f64,
    /// `E_{n+1} - E_n + dt_n ((1 - theta) D_n + theta D_{n+1})`, one entry
    /// per interval.
    pub balance_residual: Vec<f64>,
    /// `max_n |balance_residual_n| / dt_n`.
    pub max_residual_rate: f64,
    /// `max_n (E_n + cumulative_dissipation_n) / E_0 - 1`.
    pub max_relative_excess: f64,
}

impl EnergyReport {
    pub fn total(&self, n: usize) -> f64 {
        self.kinetic[n] + self.potential[n]
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&[
            "t",
            "kinetic",
            "potential",
            "dissipation",
            "cumulative_dissipation",
            "balance_residual",
        ]);
        for n in 0..self.times.len() {
            t.push(vec![
                self.times[n],
                self.kinetic[n],
                self.potential[n],
                self.dissipation[n],
                self.cumulative_dissipation[n],
                self.balance_residual.get(n).copied().unwrap_or(0.0),
            ]);
        }
        t
    }
}

/// Builds the energy series from the per-step samples recorded during the
/// run, or from the snapshots when none were recorded.
pub fn energy_report(run: &RunOutput, law: &MaterialLaw) -> Result<EnergyReport> {
    let pot = potential_for(&run.scenario);
    let samples: Vec<EnergySample> = if !run.log.energy.is_empty() {
        run.log.energy.clone()
    } else {
        let snaps = &run.snapshots;
        snaps
            .iter()
            .enumerate()
            .map(|(n, st)| EnergySample {
                t: st.t,
                dt: snaps.get(n + 1).map_or(0.0, |s| s.t - st.t),
                kinetic: kinetic_energy(st),
                potential: potential_energy(st, law, pot),
                dissipation: dissipation_rate(st, law),
            })
            .collect()
    };
    let theta = make_scheme(&run.scenario.scheme)?.implicit_fraction();
    from_samples(pot, theta, &samples)
}

pub fn from_samples(pot: Potential, theta: f64, samples: &[EnergySample]) -> Result<EnergyReport> {
    if samples.is_empty() {
        return Err(Error::config("energy", "no samples"));
    }
    let mut rep = EnergyReport {
        potential_kind: pot,
        implicit_fraction: theta,
        times: samples.iter().map(|s| s.t).collect(),
        kinetic: samples.iter().map(|s| s.kinetic).collect(),
        potential: samples.iter().map(|s| s.potential).collect(),
        dissipation: samples.iter().map(|s| s.dissipation).collect(),
        cumulative_dissipation: Vec::with_capacity(samples.len()),
        balance_residual: Vec::with_capacity(samples.len()),
        max_residual_rate: 0.0,
        max_relative_excess: 0.0,
    };
    let e0 = samples[0].total();
    let mut cum = 0.0;
    for (n, s) in samples.iter().enumerate() {
        rep.cumulative_dissipation.push(cum);
        if e0 > 0.0 {
            rep.max_relative_excess = rep.max_relative_excess.max((s.total() + cum) / e0 - 1.0);
        }
        if let Some(next) = samples.get(n + 1) {
            let work = s.dt * ((1.0 - theta) * s.dissipation + theta * next.dissipation);
            let r = next.total() - s.total() + work;
            rep.balance_residual.push(r);
            if s.dt > 0.0 {
                rep.max_residual_rate = rep.max_residual_rate.max(r.abs() / s.dt);
            }
            cum += work;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{run, DensityProfile, RadialGrid, RunOptions, Scenario, VelocityProfile};

    #[test]
    fn static_state_has_flat_energy() {
        let law = MaterialLaw::default();
        let scn = Scenario {
            t_end: 0.02,
            ..Scenario::new(law, RadialGrid::new(2.0, 32).unwrap())
        };
        let out = run(&scn, &RunOptions { record_energy: true, ..Default::default() }).unwrap();
        let rep = energy_report(&out, &law).unwrap();
        assert!(rep.dissipation.iter().all(|d| *d == 0.0));
        assert!(rep.balance_residual.iter().all(|r| *r == 0.0));
        assert_eq!(rep.max_relative_excess, 0.0);
    }

    #[test]
    fn viscous_pulse_respects_the_energy_inequality() {
        let law = MaterialLaw::default();
        let scn = Scenario {
            t_end: 0.1,
            velocity: VelocityProfile::Gaussian {
                amplitude: 0.2,
                center: 1.0,
                width: 0.25,
            },
            density: DensityProfile::Uniform { rho: law.rho_tilde },
            scheme: "imex".into(),
            ..Scenario::new(law, RadialGrid::new(4.0, 128).unwrap())
        };
        let out = run(&scn, &RunOptions { record_energy: true, ..Default::default() }).unwrap();
        let rep = energy_report(&out, &law).unwrap();
        assert!(rep.total(0) > 0.0);
        assert!(rep.max_relative_excess <= 0.02, "{}", rep.max_relative_excess);
        assert!(*rep.cumulative_dissipation.last().unwrap() > 0.0);
    }
}
