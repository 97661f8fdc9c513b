//! Vacuum measure, containment in the transported annulus and the `L^4`
//! distance to the far-field state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::InterfaceTrack;
use crate::format::CsvTable;
use crate::material::MaterialLaw;
use crate::radial::{RadialState, RunOutput};

/// The peak density is taken over the middle part of the transported
/// annulus, `[a + f w, b - f w]` with `w = b - a`, clear of the smeared
/// interface layers.
pub const CORE_MARGIN_FRACTION: f64 = 0.25;
/// Flagged cells may sit this many cells outside `[a(t), b(t)]`.
pub const CONTAINMENT_CELLS: f64 = 2.0;

pub fn default_eps_vac(delta_floor: f64) -> f64 {
    (10.0 * delta_floor).max(1e-8)
}

#[derive(Debug, Clone, Serialize)]
pub struct VacuumReport {
    pub eps_vac: f64,
    pub times: Vec<f64>,
    /// `2 pi sum r_i dr` over cells with `rho <= eps_vac`.
    pub vac_measure: Vec<f64>,
    /// `int |rho - rho_tilde|^4 dx`.
    pub l4: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Largest distance, in cells, of a flagged cell outside `[a, b]`.
    pub max_excursion_cells: Vec<f64>,
    /// Peak density over the annulus core (see [`CORE_MARGIN_FRACTION`]).
    pub in_annulus_max: Vec<f64>,
    pub contained: bool,
    /// Snapshots after the end of the interface track are not measured.
    pub measured_until: f64,
}

impl VacuumReport {
    pub fn max_excursion(&self) -> f64 {
        self.max_excursion_cells.iter().copied().fold(0.0, f64::max)
    }

    pub fn peak_in_annulus(&self) -> f64 {
        self.in_annulus_max.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t", "vac_measure", "l4", "a", "b", "max_excursion_cells", "in_annulus_max"]);
        for k in 0..self.times.len() {
            t.push(vec![
                self.times[k],
                self.vac_measure[k],
                self.l4[k],
                self.a[k],
                self.b[k],
                self.max_excursion_cells[k],
                self.in_annulus_max[k],
            ]);
        }
        t
    }
}

pub fn vacuum_measure(st: &RadialState, eps_vac: f64) -> f64 {
    (0..st.n_cells())
        .filter(|&i| st.rho[i] <= eps_vac)
        .map(|i| st.grid.cell_area(i))
        .sum()
}

pub fn l4_distance(st: &RadialState, rho_tilde: f64) -> f64 {
    (0..st.n_cells())
        .map(|i| (st.rho[i] - rho_tilde).powi(4) * st.grid.cell_area(i))
        .sum()
}

/// Measures every snapshot inside the span of `track`.
pub fn vacuum_report(
    run: &RunOutput,
    law: &MaterialLaw,
    track: &InterfaceTrack,
    eps_vac: Option<f64>,
) -> Result<VacuumReport> {
    let delta = run.scenario.delta_floor;
    let eps = eps_vac.unwrap_or_else(|| default_eps_vac(delta));
    if !(eps > 2.0 * delta) {
        return Err(Error::config(
            "eps_vac",
            format!("must exceed twice the density floor ({delta}), got {eps}"),
        ));
    }
    let mut rep = VacuumReport {
        eps_vac: eps,
        times: Vec::new(),
        vac_measure: Vec::new(),
        l4: Vec::new(),
        a: Vec::new(),
        b: Vec::new(),
        max_excursion_cells: Vec::new(),
        in_annulus_max: Vec::new(),
        contained: true,
        measured_until: run.initial().t,
    };
    for st in &run.snapshots {
        let Some((a, b)) = track.at(st.t) else { break };
        let g = st.grid;
        let dr = g.dr();
        let mut excursion = 0.0f64;
        let mut peak = 0.0f64;
        for i in 0..st.n_cells() {
            let r = g.center(i);
            if st.rho[i] <= eps {
                excursion = excursion.max((a - r).max(r - b).max(0.0) / dr);
            }
            let m = CORE_MARGIN_FRACTION * (b - a);
            if r >= a + m && r <= b - m {
                peak = peak.max(st.rho[i]);
            }
        }
        rep.times.push(st.t);
        rep.vac_measure.push(vacuum_measure(st, eps));
        rep.l4.push(l4_distance(st, law.rho_tilde));
        rep.a.push(a);
        rep.b.push(b);
        rep.max_excursion_cells.push(excursion);
        rep.in_annulus_max.push(peak);
        rep.contained &= excursion <= CONTAINMENT_CELLS;
        rep.measured_until = st.t;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{mollify_initial, DensityProfile, RadialGrid, RunLog, Scenario};
    use std::f64::consts::PI;

    fn static_track(a: f64, b: f64) -> InterfaceTrack {
        InterfaceTrack {
            times: vec![0.0, 1.0],
            a: vec![a, a],
            b: vec![b, b],
            mid: vec![0.5 * (a + b); 2],
            collision: None,
            exited: false,
        }
    }

    fn single(scn: Scenario) -> RunOutput {
        let st = mollify_initial(&scn).unwrap();
        RunOutput {
            scenario: scn,
            snapshots: vec![st],
            log: RunLog::default(),
        }
    }

    #[test]
    fn no_vacuum_means_zero_measure() {
        let law = MaterialLaw::default();
        let run = single(Scenario::new(law, RadialGrid::new(4.0, 64).unwrap()));
        let rep = vacuum_report(&run, &law, &static_track(1.0, 2.0), None).unwrap();
        assert_eq!(rep.vac_measure, vec![0.0]);
        assert!(rep.l4[0] < 1e-40);
    }

    #[test]
    fn initial_annulus_area() {
        let law = MaterialLaw::default();
        let g = RadialGrid::new(8.0, 512).unwrap();
        let (a, b) = (1.0, 2.0);
        let scn = Scenario {
            density: DensityProfile::annulus(a, b, 2.0, 1.0),
            delta_floor: 1e-4,
            mollifier_width: Some(0.0),
            ..Scenario::new(law, g)
        };
        let run = single(scn);
        let rep = vacuum_report(&run, &law, &static_track(a, b), None).unwrap();
        let exact = PI * (b * b - a * a);
        assert!((rep.vac_measure[0] - exact).abs() <= 2.0 * PI * b * g.dr());
        assert!(rep.contained);
        assert!((rep.peak_in_annulus() - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn eps_must_clear_the_floor() {
        let law = MaterialLaw::default();
        let scn = Scenario {
            delta_floor: 1e-4,
            ..Scenario::new(law, RadialGrid::new(4.0, 64).unwrap())
        };
        let run = single(scn);
        assert!(vacuum_report(&run, &law, &static_track(1.0, 2.0), Some(1e-4)).is_err());
    }
}
