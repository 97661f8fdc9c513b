//! Synthetic runs with known answers, shared by tests and the acceptance
//! suite.

use crate::material::MaterialLaw;
use crate::radial::{RadialGrid, RadialState, RunLog, RunOutput, Scenario};

fn wrap(law: &MaterialLaw, grid: RadialGrid, snapshots: Vec<RadialState>) -> RunOutput {
    RunOutput {
        scenario: Scenario::new(*law, grid),
        snapshots,
        log: RunLog::default(),
    }
}

/// Piecewise-constant snapshots with the inner state frozen at 1 on
/// `r < 1` and the outer state following `d[Lambda]/dt = -[P]`
/// (fine RK4 solve).
pub fn frozen_coefficient_run(law: &MaterialLaw, t_end: f64, n_snap: usize) -> RunOutput {
    let g = RadialGrid::new(4.0, 128).expect("valid grid");
    let face = 32;
    let rho_in = 1.0;
    let rho_of = |lam: f64| {
        let (mut lo, mut hi) = (1e-6, law.rho_bar);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if law.big_lambda(m).expect("density in range") < lam {
                lo = m
            } else {
                hi = m
            }
        }
        0.5 * (lo + hi)
    };
    let rhs = |lam: f64| -(law.p(rho_of(lam)) - law.p(rho_in));
    let mut lam = law.big_lambda(2.0).expect("density in range");
    let h = t_end / n_snap as f64;
    let sub = 20;
    let mut snaps = Vec::new();
    for k in 0..=n_snap {
        let mut st = RadialState::uniform(g, rho_of(lam), 0.0);
        st.t = h * k as f64;
        for i in 0..face {
            st.rho[i] = rho_in;
        }
        snaps.push(st);
        let dt = h / sub as f64;
        for _ in 0..sub {
            let k1 = rhs(lam);
            let k2 = rhs(lam + 0.5 * dt * k1);
            let k3 = rhs(lam + 0.5 * dt * k2);
            let k4 = rhs(lam + dt * k3);
            lam += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    wrap(law, g, snaps)
}

/// Uniform density `rho_tilde e^{-t}` with `v = r/2`, so `div u = 1`, sampled
/// every `dt`.
pub fn uniform_expansion_run(law: &MaterialLaw, dt: f64, t_end: f64) -> RunOutput {
    let g = RadialGrid::new(8.0, 128).expect("valid grid");
    let steps = (t_end / dt).round() as usize;
    let snaps = (0..=steps)
        .map(|k| {
            let t = k as f64 * dt;
            let mut st = RadialState::uniform(g, law.rho_tilde * (-t).exp(), 0.0);
            st.t = t;
            for f in 1..g.n_cells {
                st.v[f] = 0.5 * g.face(f);
            }
            st
        })
        .collect();
    wrap(law, g, snaps)
}
