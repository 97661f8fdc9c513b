//! Time-step schemes for the radial system, registered by name.
//!
//! Every scheme shares the donor-cell mass update and differs in how the
//! momentum equation is advanced.

use std::fmt::Write;
use std::sync::Arc;

use super::explicit::ExplicitEuler;
use super::imex::ImplicitViscous;
use super::state::RadialState;
use crate::error::{Error, Result};
use crate::material::MaterialLaw;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    /// Cells whose density went negative and was clipped to zero.
    pub clipped: usize,
}

pub trait StepScheme: Send + Sync {
    fn name(&self) -> &'static str;

    /// Largest admissible time step, already multiplied by `safety`.
    fn stable_dt(&self, st: &RadialState, law: &MaterialLaw, safety: f64) -> Result<f64>;

    /// Advances `st` by `dt`, returning the new state.
    fn step(&self, st: &RadialState, law: &MaterialLaw, dt: f64) -> Result<(RadialState, StepStats)>;

    /// Weight of the end-of-step state in the viscous term: 0 for explicit,
    /// 1 for backward Euler. Energy budgets integrate the dissipation with
    /// the same weight.
    fn implicit_fraction(&self) -> f64 {
        0.0
    }
}

type SchemeFactory = fn() -> Arc<dyn StepScheme>;

fn schemes() -> Vec<(&'static str, SchemeFactory)> {
    vec![
        ("explicit", || Arc::new(ExplicitEuler)),
        ("imex", || Arc::new(ImplicitViscous::DONOR_CELL)),
        ("imex-minmod", || Arc::new(ImplicitViscous::MINMOD)),
        ("imex-superbee", || Arc::new(ImplicitViscous::SUPERBEE)),
    ]
}

pub fn scheme_names() -> Vec<&'static str> {
    schemes().into_iter().map(|(n, _)| n).collect()
}

pub fn make_scheme(name: &str) -> Result<Arc<dyn StepScheme>> {
    schemes()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f())
        .ok_or_else(|| {
            let mut msg = format!("unknown scheme `{name}`; known:");
            for n in scheme_names() {
                write!(msg, " {n}").unwrap();
            }
            Error::config("scheme", msg)
        })
}

/// Density below which a face is treated as vacuum by the momentum update.
#[inline]
pub fn vacuum_floor(delta_floor: f64) -> f64 {
    if delta_floor > 0.0 {
        1e-3 * delta_floor
    } else {
        1e-12
    }
}

/// Advective bound `dr / (|v| + c_s)` over cells, `|v|` taken as the larger
/// of the two bounding face speeds.
pub(crate) fn advective_dt(st: &RadialState, law: &MaterialLaw) -> f64 {
    let dr = st.grid.dr();
    let floor = vacuum_floor(st.delta_floor);
    (0..st.n_cells())
        .map(|i| {
            let speed = st.v[i].abs().max(st.v[i + 1].abs());
            let cs = if st.rho[i] > floor {
                law.sound_speed(st.rho[i])
            } else {
                0.0
            };
            dr / (speed + cs)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Face value of the transported density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reconstruction {
    /// Upwind cell value.
    DonorCell,
    /// Upwind cell value plus a minmod-limited half-cell slope; stays
    /// between the two neighbouring cell values, so positivity survives.
    Minmod,
    /// Upwind cell value plus a superbee-limited slope; keeps fronts a couple
    /// of cells wide.
    Superbee,
}

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Conservative update of `rho_t + (1/r) d_r(r rho v) = 0`, written as the
/// flux difference plus the geometric term `(1/r_i)` times the average of
/// the two face fluxes. Returns the number of clipped cells.
pub(crate) fn mass_update(st: &RadialState, dt: f64, out: &mut [f64], rec: Reconstruction) -> usize {
    let n = st.n_cells();
    let dr = st.grid.dr();
    let rho = &st.rho;
    let slope = |i: usize| -> f64 {
        if rec == Reconstruction::DonorCell || i == 0 || i + 1 == n {
            0.0
        } else {
            let (a, b) = (rho[i] - rho[i - 1], rho[i + 1] - rho[i]);
            match rec {
                Reconstruction::Superbee => {
                    let s1 = minmod(b, 2.0 * a);
                    let s2 = minmod(2.0 * b, a);
                    if s1.abs() > s2.abs() { s1 } else { s2 }
                }
                _ => minmod(a, b),
            }
        }
    };
    let flux = |k: usize| -> f64 {
        if k == 0 || k == n {
            return 0.0;
        }
        let v = st.v[k];
        v * if v >= 0.0 {
            rho[k - 1] + 0.5 * slope(k - 1)
        } else {
            rho[k] - 0.5 * slope(k)
        }
    };
    let mut clipped = 0;
    let mut left = flux(0);
    for i in 0..n {
        let right = flux(i + 1);
        let ri = st.grid.center(i);
        let div = (right - left) / dr + 0.5 * (right + left) / ri;
        let mut r = rho[i] - dt * div;
        if r < 0.0 {
            r = 0.0;
            clipped += 1;
        }
        out[i] = r;
        left = right;
    }
    clipped
}

/// Upwind `v d_r v` at interior face `k`.
#[inline]
pub(crate) fn advection(st: &RadialState, k: usize) -> f64 {
    let dr = st.grid.dr();
    let v = st.v[k];
    if v >= 0.0 {
        v * (v - st.v[k - 1]) / dr
    } else {
        v * (st.v[k + 1] - v) / dr
    }
}
