use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use super::profile::{DensityProfile, VelocityProfile};
use crate::error::{Error, Result};
use crate::material::MaterialLaw;

/// Everything needed to integrate one radial problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub law: MaterialLaw,
    pub grid: RadialGrid,
    pub density: DensityProfile,
    pub velocity: VelocityProfile,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub delta_floor: f64,
    /// Mollifier kernel name, see [`super::mollify::kernel_names`].
    pub mollifier: String,
    /// Mollifier half-width; defaults to `2 dr`.
    pub mollifier_width: Option<f64>,
    /// Time-step scheme name, see [`super::scheme::scheme_names`].
    pub scheme: String,
}

impl Scenario {
    /// Static far-field state on the given grid.
    pub fn new(law: MaterialLaw, grid: RadialGrid) -> Self {
        Scenario {
            law,
            grid,
            density: DensityProfile::Uniform { rho: law.rho_tilde },
            velocity: VelocityProfile::Zero,
            t_end: 1.0,
            cfl_safety: 0.4,
            delta_floor: 0.0,
            mollifier: "friedrichs".into(),
            mollifier_width: None,
            scheme: "explicit".into(),
        }
    }

    /// Density at infinity; zero for compactly supported data.
    pub fn far_field_density(&self) -> f64 {
        self.density.far_field()
    }

    pub fn is_compact_support(&self) -> bool {
        self.far_field_density() == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        self.law.validate()?;
        self.grid.validate()?;
        self.density.validate(self.grid.r_max)?;
        self.velocity.validate(self.grid.r_max)?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config("time.T", "must be finite and >= 0"));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::config("time.cfl_safety", "must lie in (0, 1]"));
        }
        if !(self.delta_floor >= 0.0) {
            return Err(Error::config("regularization.delta_floor", "must be >= 0"));
        }
        if let Some(w) = self.mollifier_width {
            if !(w >= 0.0) {
                return Err(Error::config("regularization.mollifier_width", "must be >= 0"));
            }
        }
        let far = self.far_field_density();
        if far > self.law.rho_bar {
            return Err(Error::config("density", "far-field density exceeds rho_bar"));
        }
        Ok(())
    }
}
