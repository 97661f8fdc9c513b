//! Initial density and velocity profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radial initial density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityProfile {
    Uniform {
        rho: f64,
    },
    /// Piecewise constant: `values[j]` on `(breaks[j-1], breaks[j])`, with
    /// `values.len() == breaks.len() + 1`.
    Piecewise {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
    /// `base + amplitude * exp(-((r - center)/width)^2)`.
    Gaussian {
        base: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `amplitude (1 - (r/radius)^2)^power` on `r < radius`, zero beyond.
    Bump {
        amplitude: f64,
        radius: f64,
        power: f64,
    },
}

impl DensityProfile {
    /// Density `inner` for `r < a`, vacuum on `(a, b)`, `outer` beyond `b`.
    pub fn annulus(a: f64, b: f64, inner: f64, outer: f64) -> Self {
        DensityProfile::Piecewise {
            breaks: vec![a, b],
            values: vec![inner, 0.0, outer],
        }
    }

    pub fn step(r_jump: f64, inner: f64, outer: f64) -> Self {
        DensityProfile::Piecewise {
            breaks: vec![r_jump],
            values: vec![inner, outer],
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            DensityProfile::Uniform { rho } => *rho,
            DensityProfile::Piecewise { breaks, values } => piecewise(breaks, values, r),
            DensityProfile::Gaussian {
                base,
                amplitude,
                center,
                width,
            } => base + amplitude * (-((r - center) / width).powi(2)).exp(),
            DensityProfile::Bump {
                amplitude,
                radius,
                power,
            } => {
                if r.abs() < *radius {
                    amplitude * (1.0 - (r / radius).powi(2)).powf(*power)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        match self {
            DensityProfile::Piecewise { breaks, .. } => breaks,
            DensityProfile::Bump { radius, .. } => std::slice::from_ref(radius),
            _ => &[],
        }
    }

    /// Density as `r -> infinity`.
    pub fn far_field(&self) -> f64 {
        match self {
            DensityProfile::Uniform { rho } => *rho,
            DensityProfile::Piecewise { values, .. } => *values.last().unwrap_or(&0.0),
            DensityProfile::Gaussian { base, .. } => *base,
            DensityProfile::Bump { .. } => 0.0,
        }
    }

    /// Radius beyond which the profile vanishes identically, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            DensityProfile::Uniform { rho } if *rho == 0.0 => Some(0.0),
            DensityProfile::Piecewise { breaks, values } => {
                if *values.last()? != 0.0 {
                    return None;
                }
                let last = values.iter().rposition(|v| *v != 0.0);
                Some(last.map_or(0.0, |j| breaks[j]))
            }
            DensityProfile::Bump { radius, .. } => Some(*radius),
            _ => None,
        }
    }

    pub fn validate(&self, r_max: f64) -> Result<()> {
        match self {
            DensityProfile::Uniform { rho } => nonneg("density.rho", *rho),
            DensityProfile::Piecewise { breaks, values } => {
                check_pieces("density", breaks, values, r_max)?;
                for v in values {
                    nonneg("density.values", *v)?;
                }
                Ok(())
            }
            DensityProfile::Gaussian {
                base,
                amplitude,
                width,
                ..
            } => {
                nonneg("density.base", *base)?;
                nonneg("density.base+amplitude", base + amplitude.min(0.0))?;
                if !(*width > 0.0) {
                    return Err(Error::config("density.width", "must be > 0"));
                }
                Ok(())
            }
            DensityProfile::Bump {
                amplitude,
                radius,
                power,
            } => {
                nonneg("density.amplitude", *amplitude)?;
                if !(*radius > 0.0 && *radius < r_max) {
                    return Err(Error::config("density.radius", "must lie in (0, r_max)"));
                }
                if !(*power >= 0.0 && power.is_finite()) {
                    return Err(Error::config("density.power", "must be finite and >= 0"));
                }
                Ok(())
            }
        }
    }
}

/// Radial initial velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VelocityProfile {
    #[default]
    Zero,
    /// `v = k r`.
    Rigid { k: f64 },
    /// `amplitude * exp(-((r - center)/width)^2)`.
    Gaussian {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    Piecewise {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
}

impl VelocityProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            VelocityProfile::Zero => 0.0,
            VelocityProfile::Rigid { k } => k * r,
            VelocityProfile::Gaussian {
                amplitude,
                center,
                width,
            } => amplitude * (-((r - center) / width).powi(2)).exp(),
            VelocityProfile::Piecewise { breaks, values } => piecewise(breaks, values, r),
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        match self {
            VelocityProfile::Piecewise { breaks, .. } => breaks,
            _ => &[],
        }
    }

    pub fn validate(&self, r_max: f64) -> Result<()> {
        match self {
            VelocityProfile::Piecewise { breaks, values } => {
                check_pieces("velocity", breaks, values, r_max)
            }
            VelocityProfile::Gaussian { width, .. } if !(*width > 0.0) => {
                Err(Error::config("velocity.width", "must be > 0"))
            }
            _ => Ok(()),
        }
    }
}

fn piecewise(breaks: &[f64], values: &[f64], r: f64) -> f64 {
    let j = breaks.partition_point(|b| *b <= r);
    values[j]
}

fn nonneg(key: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be finite and >= 0, got {v}")))
    }
}

fn check_pieces(key: &str, breaks: &[f64], values: &[f64], r_max: f64) -> Result<()> {
    if values.len() != breaks.len() + 1 {
        return Err(Error::config(
            format!("{key}.values"),
            "need exactly one more value than breaks",
        ));
    }
    if breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config(format!("{key}.breaks"), "must be strictly increasing"));
    }
    if breaks.iter().any(|b| !(*b > 0.0 && *b < r_max)) {
        return Err(Error::config(format!("{key}.breaks"), "must lie in (0, r_max)"));
    }
    Ok(())
}
