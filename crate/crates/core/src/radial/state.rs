use serde::Serialize;

use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::material::MaterialLaw;

/// Solution at one time level: cell densities and face velocities.
///
/// `v` has `n_cells + 1` entries; `v[0]` (axis) and `v[n_cells]` (outer
/// boundary) are held at zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialState {
    pub t: f64,
    pub grid: RadialGrid,
    pub rho: Vec<f64>,
    pub v: Vec<f64>,
    pub delta_floor: f64,
}

impl RadialState {
    pub fn uniform(grid: RadialGrid, rho: f64, delta_floor: f64) -> Self {
        RadialState {
            t: 0.0,
            grid,
            rho: vec![rho; grid.n_cells],
            v: vec![0.0; grid.n_cells + 1],
            delta_floor,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.rho.len()
    }

    pub fn check_integrity(&self) -> Result<()> {
        if self.rho.len() != self.grid.n_cells || self.v.len() != self.grid.n_cells + 1 {
            return Err(Error::Integrity("state arrays do not match grid".into()));
        }
        if let Some(i) = self.rho.iter().position(|r| !r.is_finite()) {
            return Err(Error::Integrity(format!(
                "non-finite density in cell {i} at t={}",
                self.t
            )));
        }
        if let Some(k) = self.v.iter().position(|v| !v.is_finite()) {
            return Err(Error::Integrity(format!(
                "non-finite velocity at face {k} at t={}",
                self.t
            )));
        }
        Ok(())
    }

    /// Total mass `sum rho_i 2 pi r_i dr`.
    pub fn mass(&self) -> f64 {
        self.rho
            .iter()
            .enumerate()
            .map(|(i, r)| r * self.grid.cell_area(i))
            .sum()
    }

    /// Density averaged onto face `k` (interior faces only).
    #[inline]
    pub fn face_density(&self, k: usize) -> f64 {
        0.5 * (self.rho[k - 1] + self.rho[k])
    }

    /// `d_r v + v/r` at the center of cell `i`.
    #[inline]
    pub fn cell_divergence(&self, i: usize) -> f64 {
        let dr = self.grid.dr();
        (self.v[i + 1] - self.v[i]) / dr + 0.5 * (self.v[i] + self.v[i + 1]) / self.grid.center(i)
    }

    pub fn divergence(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|i| self.cell_divergence(i)).collect()
    }

    /// Viscous normal stress `(lambda + 2 mu)(v_r + v/r)` per cell.
    pub fn stress(&self, law: &MaterialLaw) -> Vec<f64> {
        (0..self.n_cells())
            .map(|i| law.long_visc(self.rho[i]) * self.cell_divergence(i))
            .collect()
    }

    /// Effective viscous flux `F = stress - P + P(rho_far)` per cell.
    pub fn effective_flux(&self, law: &MaterialLaw, p_far: f64) -> Vec<f64> {
        (0..self.n_cells())
            .map(|i| law.long_visc(self.rho[i]) * self.cell_divergence(i) - law.p(self.rho[i]) + p_far)
            .collect()
    }

    /// Velocity at radius `r` by linear interpolation between faces.
    pub fn velocity_at(&self, r: f64) -> Option<f64> {
        let dr = self.grid.dr();
        if !(r >= 0.0) || r > self.grid.r_max {
            return None;
        }
        let x = r / dr;
        let k = (x.floor() as usize).min(self.grid.n_cells - 1);
        let w = x - k as f64;
        Some((1.0 - w) * self.v[k] + w * self.v[k + 1])
    }

    /// Density at radius `r`, piecewise linear between cell centers.
    pub fn density_at(&self, r: f64) -> Option<f64> {
        if !(r >= 0.0) || r > self.grid.r_max {
            return None;
        }
        let n = self.n_cells();
        let x = r / self.grid.dr() - 0.5;
        if x <= 0.0 {
            return Some(self.rho[0]);
        }
        let i = x.floor() as usize;
        if i >= n - 1 {
            return Some(self.rho[n - 1]);
        }
        let w = x - i as f64;
        Some((1.0 - w) * self.rho[i] + w * self.rho[i + 1])
    }

    pub fn min_density(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_density(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|rho - rho_far|` over the outermost 5% of cells.
    pub fn outer_activity(&self, rho_far: f64) -> f64 {
        let n = self.n_cells();
        let start = n - (n / 20).max(1);
        self.rho[start..]
            .iter()
            .map(|r| (r - rho_far).abs())
            .fold(0.0, f64::max)
    }
}
