//! Mollification of the initial data: `rho0_delta = j_w * rho0 + delta`,
//! `v0_delta = j_w * v0`.
//!
//! Convolution is taken along the radius with the profile extended evenly
//! (density) or oddly (velocity) across the axis.

use std::fmt::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

use super::profile::{DensityProfile, VelocityProfile};
use super::scenario::Scenario;
use super::state::RadialState;

/// A compactly supported, even mollifier shape on `[-1, 1]`.
pub trait Kernel: Send + Sync {
    fn name(&self) -> &'static str;
    /// Unnormalized shape; zero outside `(-1, 1)`.
    fn shape(&self, s: f64) -> f64;
}

/// `exp(-1 / (1 - s^2))`, the standard smooth bump.
pub struct Friedrichs;

impl Kernel for Friedrichs {
    fn name(&self) -> &'static str {
        "friedrichs"
    }
    fn shape(&self, s: f64) -> f64 {
        if s.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - s * s)).exp()
        }
    }
}

pub struct Hat;

impl Kernel for Hat {
    fn name(&self) -> &'static str {
        "hat"
    }
    fn shape(&self, s: f64) -> f64 {
        (1.0 - s.abs()).max(0.0)
    }
}

/// Raised cosine `(1 + cos(pi s)) / 2`.
pub struct Cosine;

impl Kernel for Cosine {
    fn name(&self) -> &'static str {
        "cosine"
    }
    fn shape(&self, s: f64) -> f64 {
        if s.abs() >= 1.0 {
            0.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * s).cos())
        }
    }
}

type KernelFactory = fn() -> Arc<dyn Kernel>;

fn kernels() -> Vec<(&'static str, KernelFactory)> {
    vec![
        ("friedrichs", || Arc::new(Friedrichs)),
        ("hat", || Arc::new(Hat)),
        ("cosine", || Arc::new(Cosine)),
    ]
}

pub fn kernel_names() -> Vec<&'static str> {
    kernels().into_iter().map(|(n, _)| n).collect()
}

/// Looks up a mollifier kernel by name.
pub fn make_kernel(name: &str) -> Result<Arc<dyn Kernel>> {
    kernels()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f())
        .ok_or_else(|| {
            let mut msg = format!("unknown kernel `{name}`; known:");
            for n in kernel_names() {
                write!(msg, " {n}").unwrap();
            }
            Error::config("mollifier", msg)
        })
}

const TOL: f64 = 1e-13;

/// Normalized kernel of half-width `width`.
pub struct Mollifier {
    kernel: Arc<dyn Kernel>,
    width: f64,
    norm: f64,
}

impl Mollifier {
    pub fn new(kernel: Arc<dyn Kernel>, width: f64) -> Self {
        let norm = adaptive_simpson(|s| kernel.shape(s), -1.0, 1.0, TOL).value;
        Mollifier {
            kernel,
            width,
            norm,
        }
    }

    fn weight(&self, y: f64) -> f64 {
        self.kernel.shape(y / self.width) / (self.width * self.norm)
    }

    /// `(j_w * f)(r)` where `f` is evaluated through `ext`, the extension of
    /// the profile to negative radii; `breaks` are the profile's
    /// discontinuities on `r > 0`.
    pub fn convolve<F: Fn(f64) -> f64>(&self, ext: F, breaks: &[f64], r: f64) -> f64 {
        if self.width <= 0.0 {
            return ext(r);
        }
        let (lo, hi) = (-self.width, self.width);
        // Split at points where the argument r - y crosses a discontinuity
        // of the extended profile (including the reflection of each break).
        let mut cuts = vec![lo, hi];
        for b in breaks {
            for x in [*b, -*b] {
                let y = r - x;
                if y > lo && y < hi {
                    cuts.push(y);
                }
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.windows(2)
            .map(|w| adaptive_simpson(|y| self.weight(y) * ext(r - y), w[0], w[1], TOL).value)
            .sum()
    }
}

fn even_density(p: &DensityProfile) -> impl Fn(f64) -> f64 + '_ {
    move |x| p.eval(x.abs())
}

fn odd_velocity(p: &VelocityProfile) -> impl Fn(f64) -> f64 + '_ {
    move |x| {
        let v = p.eval(x.abs());
        if x < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// Builds the regularized initial state for a scenario.
pub fn mollify_initial(scn: &Scenario) -> Result<RadialState> {
    if !(scn.delta_floor >= 0.0) {
        return Err(Error::config("delta_floor", "must be >= 0"));
    }
    let grid = scn.grid;
    let width = scn.mollifier_width.unwrap_or(2.0 * grid.dr());
    let moll = Mollifier::new(make_kernel(&scn.mollifier)?, width);

    let dens = even_density(&scn.density);
    let rho: Vec<f64> = (0..grid.n_cells)
        .map(|i| moll.convolve(&dens, scn.density.breakpoints(), grid.center(i)) + scn.delta_floor)
        .collect();
    if let Some(i) = rho.iter().position(|r| *r > scn.law.rho_bar) {
        return Err(Error::config(
            "density",
            format!(
                "mollified density {} in cell {i} exceeds rho_bar = {}",
                rho[i], scn.law.rho_bar
            ),
        ));
    }

    let vel = odd_velocity(&scn.velocity);
    let mut v: Vec<f64> = (0..=grid.n_cells)
        .map(|k| moll.convolve(&vel, scn.velocity.breakpoints(), grid.face(k)))
        .collect();
    v[0] = 0.0;
    v[grid.n_cells] = 0.0;

    Ok(RadialState {
        t: 0.0,
        grid,
        rho,
        v,
        delta_floor: scn.delta_floor,
    })
}
