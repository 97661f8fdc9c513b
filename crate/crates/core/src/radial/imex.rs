//! Explicit mass, advection and pressure; backward-Euler viscous term.
//!
//! With `S_i = nu_i (R_{i+1} v_{i+1} - R_i v_i) / (r_i dr)` the viscous
//! operator `L v_k = (S_k - S_{k-1}) / dr` satisfies
//! `sum_k R_k w_k (L v)_k = -sum_i r_i nu_i (Dv)_i (Dw)_i`, so
//! `diag(rho_f) - dt L` is symmetric positive definite after scaling by
//! `R_k`, including rows where the face density vanishes. The tridiagonal
//! system is solved without pivoting.

use super::scheme::{advection, advective_dt, mass_update, Reconstruction, StepScheme, StepStats};
use super::state::RadialState;
use crate::error::{Error, Result};
use crate::material::MaterialLaw;

pub struct ImplicitViscous {
    pub reconstruction: Reconstruction,
}

impl ImplicitViscous {
    pub const DONOR_CELL: ImplicitViscous = ImplicitViscous {
        reconstruction: Reconstruction::DonorCell,
    };
    pub const MINMOD: ImplicitViscous = ImplicitViscous {
        reconstruction: Reconstruction::Minmod,
    };
    pub const SUPERBEE: ImplicitViscous = ImplicitViscous {
        reconstruction: Reconstruction::Superbee,
    };
}

impl StepScheme for ImplicitViscous {
    fn name(&self) -> &'static str {
        match self.reconstruction {
            Reconstruction::DonorCell => "imex",
            Reconstruction::Minmod => "imex-minmod",
            Reconstruction::Superbee => "imex-superbee",
        }
    }

    fn implicit_fraction(&self) -> f64 {
        1.0
    }

    fn stable_dt(&self, st: &RadialState, law: &MaterialLaw, safety: f64) -> Result<f64> {
        st.check_integrity()?;
        let dt = safety * advective_dt(st, law);
        if dt > 0.0 && dt.is_finite() {
            Ok(dt)
        } else {
            Err(Error::Integrity(format!("no admissible time step (dt = {dt})")))
        }
    }

    fn step(&self, st: &RadialState, law: &MaterialLaw, dt: f64) -> Result<(RadialState, StepStats)> {
        let n = st.n_cells();
        let g = st.grid;
        let dr = g.dr();

        let mut rho = vec![0.0; n];
        let clipped = mass_update(st, dt, &mut rho, self.reconstruction);

        let nu: Vec<f64> = st.rho.iter().map(|r| law.long_visc(*r)).collect();
        let m = n - 1;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        let c = dt / (dr * dr);
        for j in 0..m {
            let k = j + 1;
            let rk = g.face(k);
            let rho_f = st.face_density(k);
            let (ra, rb) = (g.center(k - 1), g.center(k));
            lower[j] = -c * nu[k - 1] * g.face(k - 1) / ra;
            upper[j] = -c * nu[k] * g.face(k + 1) / rb;
            diag[j] = rho_f + c * rk * (nu[k] / rb + nu[k - 1] / ra);
            let grad_p = (law.p(st.rho[k]) - law.p(st.rho[k - 1])) / dr;
            rhs[j] = rho_f * (st.v[k] - dt * advection(st, k)) - dt * grad_p;
        }
        // Face 0 sits on the axis (R_0 = 0) and face n carries v = 0, so the
        // boundary couplings vanish.
        lower[0] = 0.0;
        upper[m - 1] = 0.0;
        let sol = thomas(&lower, &diag, &upper, &rhs)?;

        let mut v = vec![0.0; n + 1];
        v[1..n].copy_from_slice(&sol);
        let next = RadialState {
            t: st.t + dt,
            grid: g,
            rho,
            v,
            delta_floor: st.delta_floor,
        };
        next.check_integrity()?;
        Ok((next, StepStats { clipped }))
    }
}

/// Solves a tridiagonal system; `lower[0]` and `upper[last]` are ignored.
pub(crate) fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(Error::Integrity("singular tridiagonal system".into()));
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for j in 1..m {
        denom = diag[j] - lower[j] * c[j - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Integrity("singular tridiagonal system".into()));
        }
        c[j] = if j + 1 < m { upper[j] / denom } else { 0.0 };
        d[j] = (rhs[j] - lower[j] * d[j - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for j in (0..m - 1).rev() {
        x[j] = d[j] - c[j] * x[j + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::RadialGrid;

    #[test]
    fn thomas_solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3, 5, 3] -> x = [1, 1, 1]
        let x = thomas(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0], &[3.0, 5.0, 3.0]).unwrap();
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let l = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 64).unwrap();
        let mut st = RadialState::uniform(g, l.rho_tilde, 0.0);
        let s = ImplicitViscous::DONOR_CELL;
        for _ in 0..50 {
            let dt = s.stable_dt(&st, &l, 0.4).unwrap();
            st = s.step(&st, &l, dt).unwrap().0;
        }
        assert!(st.rho.iter().all(|r| *r == l.rho_tilde));
        assert!(st.v.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn pure_vacuum_gap_relaxes_to_quasi_static_profile() {
        // Zero density on an inner band: the solve there reduces to
        // d_r((v_r + v/r)) = 0, i.e. v = alpha r + beta / r.
        let l = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 128).unwrap();
        let mut st = RadialState::uniform(g, 1.0, 0.0);
        for i in 30..60 {
            st.rho[i] = 0.0;
        }
        for k in 1..g.n_cells {
            st.v[k] = 0.1 * (g.face(k)).sin();
        }
        let (next, _) = ImplicitViscous::DONOR_CELL.step(&st, &l, 1e-3).unwrap();
        // Interior vacuum faces 32..=58: check S is constant across them.
        let s = next.stress(&l);
        let ref_s = s[40];
        for (i, si) in s.iter().enumerate().take(58).skip(32) {
            assert!((si - ref_s).abs() < 1e-9 * ref_s.abs().max(1.0), "{i}");
        }
    }
}
