//! Midpoint-rule integrals over the radial grid with measure `2 pi r dr`.

use serde::{Deserialize, Serialize};

use super::state::RadialState;
use crate::material::MaterialLaw;

/// Which internal-energy density enters the energy budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    /// `G(rho)`, relative to the far-field density `rho_tilde`.
    Relative,
    /// `Gbar(rho)`, relative to vacuum; used for compactly supported data.
    Absolute,
}

impl Potential {
    #[inline]
    pub fn density(&self, law: &MaterialLaw, rho: f64) -> f64 {
        match self {
            Potential::Relative => law.potential_g(rho.max(0.0)).unwrap_or(0.0),
            Potential::Absolute => law.p(rho) / (law.gamma - 1.0),
        }
    }
}

/// `sum_k 1/2 rho_f v_k^2` over interior faces, each face carrying the dual
/// ring `2 pi R_k dr`.
pub fn kinetic_energy(st: &RadialState) -> f64 {
    (1..st.n_cells())
        .map(|k| 0.5 * st.face_density(k) * st.v[k] * st.v[k] * st.grid.face_area(k))
        .sum()
}

pub fn potential_energy(st: &RadialState, law: &MaterialLaw, pot: Potential) -> f64 {
    st.rho
        .iter()
        .enumerate()
        .map(|(i, r)| pot.density(law, *r) * st.grid.cell_area(i))
        .sum()
}

/// `int (lambda + 2 mu)(v_r + v/r)^2 dx`.
pub fn dissipation_rate(st: &RadialState, law: &MaterialLaw) -> f64 {
    (0..st.n_cells())
        .map(|i| {
            let d = st.cell_divergence(i);
            law.long_visc(st.rho[i]) * d * d * st.grid.cell_area(i)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::RadialGrid;
    use std::f64::consts::PI;

    #[test]
    fn rigid_expansion_dissipation() {
        // v = k r on a constant-density disk: (v_r + v/r) = 2k exactly.
        let law = MaterialLaw::default();
        let g = RadialGrid::new(2.0, 64).unwrap();
        let mut st = RadialState::uniform(g, 1.5, 0.0);
        let k = 0.25;
        for (f, v) in st.v.iter_mut().enumerate() {
            *v = k * g.face(f);
        }
        let d = dissipation_rate(&st, &law);
        let expect = law.long_visc(1.5) * (2.0 * k).powi(2) * PI * 4.0;
        assert!((d - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn static_far_field_has_zero_energy() {
        let law = MaterialLaw::default();
        let st = RadialState::uniform(RadialGrid::new(2.0, 32).unwrap(), law.rho_tilde, 0.0);
        assert_eq!(kinetic_energy(&st), 0.0);
        assert_eq!(potential_energy(&st, &law, Potential::Relative), 0.0);
        assert_eq!(dissipation_rate(&st, &law), 0.0);
    }
}
