//! Residual of the mass equation along a particle path,
//! `d/dt Lambda(rho) + P(rho) - P(rho_tilde) + F = 0`.

use serde::Serialize;

use crate::error::Result;
use crate::flow::ParticlePath;
use crate::format::CsvTable;
use crate::material::MaterialLaw;
use crate::radial::{RadialState, RunOutput};

#[derive(Debug, Clone, Serialize)]
pub struct ParticleOdeRecord {
    pub times: Vec<f64>,
    pub r: Vec<f64>,
    pub rho: Vec<f64>,
    pub big_lambda: Vec<f64>,
    pub flux: Vec<f64>,
    /// Residual at interior samples (centered differences); zero at the ends.
    pub residual: Vec<f64>,
    /// `(sum R^2 dt)^(1/2)` over interior samples.
    pub l2: f64,
    pub max_abs: f64,
    /// Time at which the path entered vacuum or left the stored data.
    pub truncated_at: Option<f64>,
}

impl ParticleOdeRecord {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["t", "r", "rho", "Lambda", "F", "residual"]);
        for k in 0..self.times.len() {
            t.push(vec![
                self.times[k],
                self.r[k],
                self.rho[k],
                self.big_lambda[k],
                self.flux[k],
                self.residual[k],
            ]);
        }
        t
    }
}

/// Linear interpolation of cell-centered values, constant beyond the first
/// and last centers.
fn cell_interp(st: &RadialState, values: &[f64], r: f64) -> f64 {
    let n = values.len();
    let x = r / st.grid.dr() - 0.5;
    if x <= 0.0 {
        return values[0];
    }
    let i = x.floor() as usize;
    if i >= n - 1 {
        return values[n - 1];
    }
    let w = x - i as f64;
    (1.0 - w) * values[i] + w * values[i + 1]
}

/// Evaluates the residual at every snapshot time sampled by `path`.
pub fn particle_ode_residual(
    run: &RunOutput,
    path: &ParticlePath,
    law: &MaterialLaw,
    vacuum_below: f64,
) -> Result<ParticleOdeRecord> {
    let pt = law.p_tilde();
    let mut rec = ParticleOdeRecord {
        times: Vec::new(),
        r: Vec::new(),
        rho: Vec::new(),
        big_lambda: Vec::new(),
        flux: Vec::new(),
        residual: Vec::new(),
        l2: 0.0,
        max_abs: 0.0,
        truncated_at: None,
    };
    let mut pressure = Vec::new();
    for st in &run.snapshots {
        let Some(x) = path.at(st.t) else {
            if st.t > path.t0 {
                rec.truncated_at.get_or_insert(st.t);
            }
            continue;
        };
        if rec.truncated_at.is_some() {
            break;
        }
        let r = x[0];
        let rho = cell_interp(st, &st.rho, r);
        if rho <= vacuum_below {
            rec.truncated_at = Some(st.t);
            break;
        }
        let f = cell_interp(st, &st.effective_flux(law, pt), r);
        rec.times.push(st.t);
        rec.r.push(r);
        rec.rho.push(rho);
        rec.big_lambda.push(law.big_lambda(rho)?);
        rec.flux.push(f);
        pressure.push(law.p(rho) - pt);
    }
    let n = rec.times.len();
    rec.residual = vec![0.0; n];
    let mut ss = 0.0;
    #[allow(clippy::needless_range_loop)]
    for k in 1..n.saturating_sub(1) {
        let dl = (rec.big_lambda[k + 1] - rec.big_lambda[k - 1]) / (rec.times[k + 1] - rec.times[k - 1]);
        let res = dl + pressure[k] + rec.flux[k];
        rec.residual[k] = res;
        ss += res * res * 0.5 * (rec.times[k + 1] - rec.times[k - 1]);
        rec.max_abs = rec.max_abs.max(res.abs());
    }
    rec.l2 = ss.sqrt();
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{integrate_path, RadialHistory};
    use crate::radial::{RadialGrid, RunLog, Scenario};
    use crate::runner::synthetic::uniform_expansion_run;

    #[test]
    fn static_state_has_zero_residual() {
        let law = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 32).unwrap();
        let snaps: Vec<RadialState> = (0..5)
            .map(|k| {
                let mut s = RadialState::uniform(g, law.rho_tilde, 0.0);
                s.t = 0.1 * k as f64;
                s
            })
            .collect();
        let run = RunOutput {
            scenario: Scenario::new(law, g),
            snapshots: snaps,
            log: RunLog::default(),
        };
        let hist = RadialHistory::new(run.snapshots.clone()).unwrap();
        let p = integrate_path(&hist, [1.0, 0.0], 0.0, 0.4).unwrap();
        let rec = particle_ode_residual(&run, &p, &law, 1e-8).unwrap();
        assert_eq!(rec.times.len(), 5);
        assert!(rec.residual.iter().all(|r| *r == 0.0));
    }

    #[test]
    fn exact_expansion_residual_is_small() {
        let law = MaterialLaw::default();
        let dt = 0.01;
        let run = uniform_expansion_run(&law, dt, 0.5);
        let hist = RadialHistory::new(run.snapshots.clone()).unwrap();
        let p = integrate_path(&hist, [1.0, 0.0], 0.0, 0.5).unwrap();
        let rec = particle_ode_residual(&run, &p, &law, 1e-8).unwrap();
        assert!(rec.truncated_at.is_none());
        assert!(rec.max_abs < 10.0 * dt, "{}", rec.max_abs);
        // The path follows r = e^{t/2}.
        assert!((p.end().1[0] - 0.25f64.exp()).abs() < 1e-6);
    }
}
