//! Versioned, strict JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::blowup::require_blowup_hypotheses;
use crate::error::{Error, Result};
use crate::material::MaterialLaw;
use crate::radial::{DensityProfile, RadialGrid, Scenario, VelocityProfile};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub law: MaterialLaw,
    pub scenario: ScenarioSpec,
    pub grid: RadialGrid,
    pub time: TimeSpec,
    #[serde(default)]
    pub regularization: Regularization,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default)]
    pub diagnostics: DiagnosticsSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_scheme() -> String {
    "explicit".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSpec {
    /// Uniform density at rest; `rho` defaults to the far-field density.
    Static {
        #[serde(default)]
        rho: Option<f64>,
    },
    /// `inner` for `r < r_jump`, `outer` beyond.
    Jump {
        r_jump: f64,
        inner: f64,
        outer: f64,
        #[serde(default)]
        velocity: VelocityProfile,
    },
    /// `inner` on `r < a`, vacuum on `(a, b)`, `outer` beyond `b`.
    VacuumAnnulus {
        a: f64,
        b: f64,
        inner: f64,
        outer: f64,
        #[serde(default)]
        velocity: VelocityProfile,
    },
    /// Density with bounded support; the far field is vacuum.
    CompactSupport {
        density: DensityProfile,
        #[serde(default)]
        velocity: VelocityProfile,
    },
    /// Arbitrary prescribed profiles.
    SyntheticField {
        density: DensityProfile,
        #[serde(default)]
        velocity: VelocityProfile,
    },
}

impl ScenarioSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioSpec::Static { .. } => "static",
            ScenarioSpec::Jump { .. } => "jump",
            ScenarioSpec::VacuumAnnulus { .. } => "vacuum_annulus",
            ScenarioSpec::CompactSupport { .. } => "compact_support",
            ScenarioSpec::SyntheticField { .. } => "synthetic_field",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(rename = "T")]
    pub t_end: f64,
    /// Snapshot every this many steps; defaults to 100 without
    /// `snapshot_dt` and to 0 (off) with it.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
    #[serde(default)]
    pub snapshot_dt: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
}

impl TimeSpec {
    pub fn effective_snapshot_every(&self) -> usize {
        self.snapshot_every
            .unwrap_or(if self.snapshot_dt.is_some() { 0 } else { 100 })
    }
}

fn default_cfl() -> f64 {
    0.4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Regularization {
    pub delta_floor: f64,
    pub mollifier: String,
    pub mollifier_width: Option<f64>,
}

impl Default for Regularization {
    fn default() -> Self {
        Regularization {
            delta_floor: 0.0,
            mollifier: "friedrichs".into(),
            mollifier_width: None,
        }
    }
}

/// Diagnostic toggles. `None` enables a diagnostic when it applies to the
/// scenario kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsSpec {
    pub energy: Option<bool>,
    pub jumps: Option<bool>,
    pub decay: Option<bool>,
    pub vacuum: Option<bool>,
    pub annulus: Option<bool>,
    pub two_fluid: Option<bool>,
    pub blowup: Option<bool>,
    /// Jump detection threshold as a fraction of `rho_bar`.
    pub kappa: f64,
    /// Decay comparison stops once the contrast falls below this fraction
    /// of `rho_bar`.
    pub decay_kappa: f64,
    pub eps_vac: Option<f64>,
    pub two_fluid_window: f64,
    /// Half width of the time window over which energy rates are averaged.
    pub two_fluid_half_width: f64,
    /// Seeds of particle paths whose ODE residual is reported.
    pub particle_seeds: Vec<f64>,
    /// Seeds whose ordering is checked along the flow map.
    pub ordering_seeds: Vec<f64>,
    pub tolerances: Tolerances,
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        DiagnosticsSpec {
            energy: None,
            jumps: None,
            decay: None,
            vacuum: None,
            annulus: None,
            two_fluid: None,
            blowup: None,
            kappa: 0.01,
            decay_kappa: 0.02,
            eps_vac: None,
            two_fluid_window: 0.2,
            two_fluid_half_width: 0.01,
            particle_seeds: Vec::new(),
            ordering_seeds: Vec::new(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub mass_drift: f64,
    pub static_invariance: f64,
    pub energy_excess: f64,
    pub decay: f64,
    pub containment_cells: f64,
    pub annulus_rms: f64,
    pub annulus_rel: f64,
    pub two_fluid: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            mass_drift: 1e-10,
            static_invariance: 1e-12,
            energy_excess: 0.02,
            decay: 0.05,
            containment_cells: 2.0,
            annulus_rms: 0.05,
            annulus_rel: 0.05,
            two_fluid: 0.05,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory; the `--out` flag takes precedence.
    pub dir: Option<String>,
}

/// Which diagnostics run, after resolving the automatic toggles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Enabled {
    pub energy: bool,
    pub jumps: bool,
    pub decay: bool,
    pub vacuum: bool,
    pub annulus: bool,
    pub two_fluid: bool,
    pub blowup: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let key = e.path().to_string();
            Error::config(if key == "." { "config".into() } else { key }, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_vec(self).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn enabled(&self) -> Enabled {
        let d = &self.diagnostics;
        let kind = self.scenario.kind();
        let annulus = kind == "vacuum_annulus";
        let jump = kind == "jump";
        Enabled {
            energy: d.energy.unwrap_or(true),
            jumps: d.jumps.unwrap_or(jump),
            decay: d.decay.unwrap_or(jump),
            vacuum: d.vacuum.unwrap_or(annulus),
            annulus: d.annulus.unwrap_or(annulus),
            two_fluid: d.two_fluid.unwrap_or(annulus),
            blowup: d.blowup.unwrap_or(kind == "compact_support"),
        }
    }

    /// Interfaces `(a, b)` of a vacuum annulus scenario.
    pub fn annulus(&self) -> Option<(f64, f64)> {
        match self.scenario {
            ScenarioSpec::VacuumAnnulus { a, b, .. } => Some((a, b)),
            _ => None,
        }
    }

    pub fn scenario(&self) -> Scenario {
        let (density, velocity) = match &self.scenario {
            ScenarioSpec::Static { rho } => (
                DensityProfile::Uniform {
                    rho: rho.unwrap_or(self.law.rho_tilde),
                },
                VelocityProfile::Zero,
            ),
            ScenarioSpec::Jump {
                r_jump,
                inner,
                outer,
                velocity,
            } => (DensityProfile::step(*r_jump, *inner, *outer), velocity.clone()),
            ScenarioSpec::VacuumAnnulus {
                a,
                b,
                inner,
                outer,
                velocity,
            } => (DensityProfile::annulus(*a, *b, *inner, *outer), velocity.clone()),
            ScenarioSpec::CompactSupport { density, velocity } | ScenarioSpec::SyntheticField { density, velocity } => {
                (density.clone(), velocity.clone())
            }
        };
        Scenario {
            law: self.law,
            grid: self.grid,
            density,
            velocity,
            t_end: self.time.t_end,
            cfl_safety: self.time.cfl_safety,
            delta_floor: self.regularization.delta_floor,
            mollifier: self.regularization.mollifier.clone(),
            mollifier_width: self.regularization.mollifier_width,
            scheme: self.scheme.clone(),
        }
    }

    /// Checks every referenced parameter before any computation.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let scn = self.scenario();
        scn.validate()?;
        crate::radial::make_scheme(&self.scheme)?;
        crate::radial::mollify::make_kernel(&self.regularization.mollifier)?;
        if let Some(h) = self.time.snapshot_dt {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::config("time.snapshot_dt", "must be positive"));
            }
        }
        match &self.scenario {
            ScenarioSpec::Jump { r_jump, .. } if !(*r_jump > 0.0 && *r_jump < self.grid.r_max) => {
                return Err(Error::config("scenario.r_jump", "must lie inside (0, r_max)"));
            }
            ScenarioSpec::VacuumAnnulus { a, b, .. } => {
                if !(*a > 0.0 && a < b && *b < self.grid.r_max) {
                    return Err(Error::config("scenario", "vacuum annulus needs 0 < a < b < r_max"));
                }
                if self.grid.r_max < 4.0 * b {
                    return Err(Error::config("grid.r_max", "annulus runs need r_max >= 4 b"));
                }
            }
            ScenarioSpec::CompactSupport { .. } if !scn.is_compact_support() => {
                return Err(Error::config("scenario.density", "compact support needs a vacuum far field"));
            }
            _ => {}
        }
        let d = &self.diagnostics;
        if !(d.kappa > 0.0 && d.kappa < 1.0) {
            return Err(Error::config("diagnostics.kappa", "must lie in (0, 1)"));
        }
        if !(d.decay_kappa > 0.0 && d.decay_kappa < 1.0) {
            return Err(Error::config("diagnostics.decay_kappa", "must lie in (0, 1)"));
        }
        if !(d.two_fluid_window > 0.0) {
            return Err(Error::config("diagnostics.two_fluid_window", "must be positive"));
        }
        if !(d.two_fluid_half_width > 0.0 && 2.0 * d.two_fluid_half_width < d.two_fluid_window) {
            return Err(Error::config(
                "diagnostics.two_fluid_half_width",
                "must be positive and below half the window",
            ));
        }
        for (key, seeds) in [
            ("diagnostics.particle_seeds", &d.particle_seeds),
            ("diagnostics.ordering_seeds", &d.ordering_seeds),
        ] {
            if seeds.iter().any(|r| !(*r > 0.0 && *r < self.grid.r_max)) {
                return Err(Error::config(key, "seeds must lie inside (0, r_max)"));
            }
        }
        let on = self.enabled();
        if on.blowup {
            require_blowup_hypotheses(&self.law)?;
            if !scn.is_compact_support() {
                return Err(Error::config("diagnostics.blowup", "needs a compact-support scenario"));
            }
        }
        if (on.vacuum || on.annulus || on.two_fluid) && self.annulus().is_none() {
            return Err(Error::config("diagnostics", "vacuum diagnostics need a vacuum_annulus scenario"));
        }
        if on.two_fluid && !(self.law.gamma > 1.0) {
            return Err(Error::config("law.gamma", "the two-fluid energy identity needs gamma > 1"));
        }
        if on.decay && !matches!(self.scenario, ScenarioSpec::Jump { .. }) {
            return Err(Error::config("diagnostics.decay", "needs a jump scenario"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema_version": 1,
        "scenario": {"kind": "static"},
        "grid": {"r_max": 4.0, "n_cells": 64},
        "time": {"T": 0.1}
    }"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.law, MaterialLaw::default());
        assert_eq!(c.scheme, "explicit");
        assert_eq!(c.time.cfl_safety, 0.4);
        assert!(c.enabled().energy && !c.enabled().decay);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn unknown_keys_are_named() {
        let text = MINIMAL.replace("\"T\": 0.1", "\"T\": 0.1, \"snapshot_evry\": 3");
        match RunConfig::from_json(&text) {
            Err(Error::Config { key, message }) => {
                assert_eq!(key, "time.snapshot_evry");
                assert!(message.contains("snapshot_evry"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        let text = MINIMAL.replace("\"kind\": \"static\"", "\"kind\": \"static\", \"rh0\": 1");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config { key, .. }) if key.starts_with("scenario")));
    }

    #[test]
    fn blowup_needs_the_hypotheses() {
        let text = r#"{
            "schema_version": 1,
            "law": {"gamma": 1.0},
            "scenario": {"kind": "compact_support",
                         "density": {"kind": "bump", "amplitude": 1.0, "radius": 1.0, "power": 2.0}},
            "grid": {"r_max": 3.0, "n_cells": 64},
            "time": {"T": 0.1}
        }"#;
        assert!(matches!(RunConfig::from_json(text), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn annulus_geometry_is_validated() {
        let text = r#"{
            "schema_version": 1,
            "scenario": {"kind": "vacuum_annulus", "a": 1.0, "b": 2.0, "inner": 2.0, "outer": 1.0},
            "grid": {"r_max": 4.0, "n_cells": 64},
            "time": {"T": 0.1}
        }"#;
        assert!(matches!(RunConfig::from_json(text), Err(Error::Config { key, .. }) if key == "grid.r_max"));
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = MINIMAL.replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config { key, .. }) if key == "schema_version"));
    }
}
