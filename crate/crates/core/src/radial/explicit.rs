//! Forward Euler for mass and momentum, viscous term explicit.

use super::scheme::{advection, advective_dt, mass_update, vacuum_floor, Reconstruction, StepScheme, StepStats};
use super::state::RadialState;
use crate::error::{Error, Result};
use crate::material::MaterialLaw;

pub struct ExplicitEuler;

impl StepScheme for ExplicitEuler {
    fn name(&self) -> &'static str {
        "explicit"
    }

    fn stable_dt(&self, st: &RadialState, law: &MaterialLaw, safety: f64) -> Result<f64> {
        stable_dt(st, law, safety)
    }

    fn step(&self, st: &RadialState, law: &MaterialLaw, dt: f64) -> Result<(RadialState, StepStats)> {
        step(st, law, dt)
    }
}

/// `safety * min(dr / (|v| + c_s), dr^2 rho / (2 (lambda + 2 mu)))`.
///
/// The viscous bound is evaluated on cells and on faces (face density with
/// the larger neighbouring viscosity); vacuum uses the inertia floor.
pub fn stable_dt(st: &RadialState, law: &MaterialLaw, safety: f64) -> Result<f64> {
    st.check_integrity()?;
    let dr = st.grid.dr();
    let floor = vacuum_floor(st.delta_floor);
    let n = st.n_cells();
    let mut visc = f64::INFINITY;
    for i in 0..n {
        let rho = st.rho[i].max(floor);
        visc = visc.min(dr * dr * rho / (2.0 * law.long_visc(st.rho[i])));
    }
    for k in 1..n {
        let rho = st.face_density(k).max(floor);
        let nu = law.long_visc(st.rho[k - 1]).max(law.long_visc(st.rho[k]));
        visc = visc.min(dr * dr * rho / (2.0 * nu));
    }
    let dt = safety * advective_dt(st, law).min(visc);
    if dt > 0.0 && dt.is_finite() {
        Ok(dt)
    } else {
        Err(Error::Integrity(format!("no admissible time step (dt = {dt})")))
    }
}

/// One forward-Euler step of the radial system.
pub fn step(st: &RadialState, law: &MaterialLaw, dt: f64) -> Result<(RadialState, StepStats)> {
    let n = st.n_cells();
    let dr = st.grid.dr();
    let floor = vacuum_floor(st.delta_floor);

    let mut rho = vec![0.0; n];
    let clipped = mass_update(st, dt, &mut rho, Reconstruction::DonorCell);

    let stress = st.stress(law);
    let mut v = vec![0.0; n + 1];
    for k in 1..n {
        let rho_f = st.face_density(k);
        let visc = (stress[k] - stress[k - 1]) / dr;
        v[k] = if rho_f < floor {
            st.v[k] + dt * visc / floor
        } else {
            let grad_p = (law.p(st.rho[k]) - law.p(st.rho[k - 1])) / dr;
            st.v[k] - dt * advection(st, k) + dt * (visc - grad_p) / rho_f
        };
    }

    let next = RadialState {
        t: st.t + dt,
        grid: st.grid,
        rho,
        v,
        delta_floor: st.delta_floor,
    };
    next.check_integrity()?;
    Ok((next, StepStats { clipped }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::RadialGrid;

    fn law() -> MaterialLaw {
        MaterialLaw { a: 1.0, gamma: 1.0, ..Default::default() }
    }

    #[test]
    fn uniform_rest_dt_formula() {
        let l = law();
        let g = RadialGrid::new(4.0, 64).unwrap();
        let st = RadialState::uniform(g, l.rho_tilde, 0.0);
        let dr = g.dr();
        let expect = 0.5 * (dr / 1.0).min(dr * dr * l.rho_tilde / (2.0 * l.long_visc(l.rho_tilde)));
        assert!((stable_dt(&st, &l, 0.5).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn dt_drops_at_least_twofold_under_refinement() {
        let l = law();
        let g = RadialGrid::new(4.0, 64).unwrap();
        let a = stable_dt(&RadialState::uniform(g, 1.0, 0.0), &l, 0.4).unwrap();
        let b = stable_dt(&RadialState::uniform(g.refined(), 1.0, 0.0), &l, 0.4).unwrap();
        assert!(a / b >= 2.0);
    }

    #[test]
    fn vacuum_cell_is_viscous_limited() {
        let l = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 64).unwrap();
        let delta = 1e-4;
        let mut st = RadialState::uniform(g, 1.0, delta);
        for r in &mut st.rho[20..30] {
            *r = delta;
        }
        let dr = g.dr();
        let dt = stable_dt(&st, &l, 1.0).unwrap();
        // lambda(delta) = 1e-8, so the bound is dr^2 delta / (2 (2 mu + 1e-8)).
        let expect = dr * dr * delta / (2.0 * l.long_visc(delta));
        assert!((dt - expect).abs() / expect < 1e-12, "{dt} vs {expect}");
        assert!((dt - dr * dr * delta / (4.0 * l.mu)).abs() / dt < 1e-7);
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let l = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 64).unwrap();
        let mut st = RadialState::uniform(g, l.rho_tilde, 0.0);
        for _ in 0..100 {
            let dt = stable_dt(&st, &l, 0.4).unwrap();
            st = step(&st, &l, dt).unwrap().0;
        }
        assert!(st.rho.iter().all(|r| *r == l.rho_tilde));
        assert!(st.v.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rigid_expansion_has_no_interior_viscous_force() {
        let l = MaterialLaw::default();
        let g = RadialGrid::new(2.0, 32).unwrap();
        let mut st = RadialState::uniform(g, 1.0, 0.0);
        for (k, v) in st.v.iter_mut().enumerate() {
            *v = 0.3 * g.face(k);
        }
        let s = st.stress(&l);
        for k in 1..g.n_cells {
            assert!(((s[k] - s[k - 1]) / g.dr()).abs() < 1e-11);
        }
    }

    #[test]
    fn single_step_conserves_mass() {
        let l = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 128).unwrap();
        let mut st = RadialState::uniform(g, 1.0, 0.0);
        for i in 0..40 {
            st.rho[i] = 2.0;
        }
        for (k, v) in st.v.iter_mut().enumerate().take(g.n_cells).skip(1) {
            *v = 0.2 * (g.face(k) * 2.0).sin();
        }
        let m0 = st.mass();
        let dt = stable_dt(&st, &l, 0.4).unwrap();
        let (next, stats) = step(&st, &l, dt).unwrap();
        assert_eq!(stats.clipped, 0);
        assert!((next.mass() - m0).abs() / m0 < 1e-12);
        assert_eq!(next.v[0], 0.0);
        assert_eq!(next.v[g.n_cells], 0.0);
    }

    #[test]
    fn nan_aborts() {
        let l = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 16).unwrap();
        let mut st = RadialState::uniform(g, 1.0, 0.0);
        st.rho[3] = f64::NAN;
        assert!(matches!(stable_dt(&st, &l, 0.4), Err(Error::Integrity(_))));
    }
}
