//! Velocity histories sampled by the path integrator.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::planar::VectorField;
use crate::radial::RadialState;

/// Position in the plane; radial sources use only the first coordinate.
pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// `x[0]` is the radius; paths are clamped at the axis.
    Radial,
    /// Doubly periodic planar positions on `[0, 2pi)^2`.
    Planar,
}

/// Outcome of a velocity lookup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lookup {
    Inside(Point),
    /// The position left the spatial domain.
    Outside,
}

/// A time-dependent velocity field with a finite set of time knots.
pub trait VelocitySource: Send + Sync {
    fn geometry(&self) -> Geometry;
    /// Strictly increasing sample times; the integrator steps between them.
    fn knots(&self) -> &[f64];
    /// Velocity at `(x, t)`. Times outside the knot span are an error.
    fn velocity(&self, x: Point, t: f64) -> Result<Lookup>;

    fn span(&self) -> (f64, f64) {
        let k = self.knots();
        (k[0], k[k.len() - 1])
    }
}

fn check_knots(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::config("history", "need at least two snapshots"));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::config(
            "history",
            format!("snapshot times must be strictly increasing ({} then {})", w[0], w[1]),
        ));
    }
    Ok(())
}

/// Index `k` and weight `w` with `t = (1 - w) t_k + w t_{k+1}`.
fn bracket(times: &[f64], t: f64) -> Result<(usize, f64)> {
    let (t0, t1) = (times[0], times[times.len() - 1]);
    let slack = 1e-12 * (t1 - t0).abs().max(1.0);
    if !(t >= t0 - slack && t <= t1 + slack) {
        return Err(Error::Domain(format!("time {t} outside the history span [{t0}, {t1}]")));
    }
    let t = t.clamp(t0, t1);
    let k = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1) - 1;
    Ok((k, (t - times[k]) / (times[k + 1] - times[k])))
}

/// Snapshots from the radial solver; linear in time and in radius.
pub struct RadialHistory {
    times: Vec<f64>,
    states: Vec<RadialState>,
}

impl RadialHistory {
    pub fn new(states: Vec<RadialState>) -> Result<Self> {
        let times: Vec<f64> = states.iter().map(|s| s.t).collect();
        check_knots(&times)?;
        if states.windows(2).any(|w| w[0].grid != w[1].grid) {
            return Err(Error::config("history", "snapshots use different grids"));
        }
        Ok(RadialHistory { times, states })
    }

    pub fn r_max(&self) -> f64 {
        self.states[0].grid.r_max
    }

    pub fn states(&self) -> &[RadialState] {
        &self.states
    }
}

impl VelocitySource for RadialHistory {
    fn geometry(&self) -> Geometry {
        Geometry::Radial
    }

    fn knots(&self) -> &[f64] {
        &self.times
    }

    fn velocity(&self, x: Point, t: f64) -> Result<Lookup> {
        let (k, w) = bracket(&self.times, t)?;
        let r = x[0].max(0.0);
        let (Some(a), Some(b)) = (self.states[k].velocity_at(r), self.states[k + 1].velocity_at(r)) else {
            return Ok(Lookup::Outside);
        };
        Ok(Lookup::Inside([(1.0 - w) * a + w * b, 0.0]))
    }
}

/// Planar velocity snapshots; linear in time, periodic bilinear in space.
pub struct PlanarHistory {
    times: Vec<f64>,
    fields: Vec<VectorField>,
}

impl PlanarHistory {
    pub fn new(times: Vec<f64>, fields: Vec<VectorField>) -> Result<Self> {
        check_knots(&times)?;
        if times.len() != fields.len() {
            return Err(Error::config("history", "one field per snapshot time is required"));
        }
        if fields.windows(2).any(|w| w[0].n() != w[1].n()) {
            return Err(Error::config("history", "fields use different grid sizes"));
        }
        Ok(PlanarHistory { times, fields })
    }

    fn bilinear(f: &VectorField, x: Point) -> Point {
        let n = f.n();
        let h = 2.0 * PI / n as f64;
        let gx = x[0].rem_euclid(2.0 * PI) / h;
        let gy = x[1].rem_euclid(2.0 * PI) / h;
        let (i, j) = (gx.floor() as usize % n, gy.floor() as usize % n);
        let (wx, wy) = (gx - gx.floor(), gy - gy.floor());
        let interp = |c: &crate::planar::ScalarField| {
            (1.0 - wx) * (1.0 - wy) * c.at(i, j)
                + wx * (1.0 - wy) * c.at(i + 1, j)
                + (1.0 - wx) * wy * c.at(i, j + 1)
                + wx * wy * c.at(i + 1, j + 1)
        };
        [interp(&f.x), interp(&f.y)]
    }
}

impl VelocitySource for PlanarHistory {
    fn geometry(&self) -> Geometry {
        Geometry::Planar
    }

    fn knots(&self) -> &[f64] {
        &self.times
    }

    fn velocity(&self, x: Point, t: f64) -> Result<Lookup> {
        let (k, w) = bracket(&self.times, t)?;
        let a = Self::bilinear(&self.fields[k], x);
        let b = Self::bilinear(&self.fields[k + 1], x);
        Ok(Lookup::Inside([(1.0 - w) * a[0] + w * b[0], (1.0 - w) * a[1] + w * b[1]]))
    }
}

type FieldFn = Arc<dyn Fn(Point, f64) -> Point + Send + Sync>;

/// A closed-form velocity field evaluated exactly; the knots only set the
/// integrator step.
pub struct AnalyticField {
    geometry: Geometry,
    knots: Vec<f64>,
    /// Radial domain limit; ignored for planar fields.
    r_max: f64,
    f: FieldFn,
}

impl AnalyticField {
    pub fn radial(knots: Vec<f64>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_knots(&knots)?;
        Ok(AnalyticField {
            geometry: Geometry::Radial,
            knots,
            r_max: f64::INFINITY,
            f: Arc::new(move |x, t| [f(x[0], t), 0.0]),
        })
    }

    pub fn planar(knots: Vec<f64>, f: impl Fn(Point, f64) -> Point + Send + Sync + 'static) -> Result<Self> {
        check_knots(&knots)?;
        Ok(AnalyticField {
            geometry: Geometry::Planar,
            knots,
            r_max: f64::INFINITY,
            f: Arc::new(f),
        })
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = r_max;
        self
    }
}

/// `n + 1` equally spaced knots on `[t0, t1]`.
pub fn uniform_knots(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t0 + (t1 - t0) * k as f64 / n as f64).collect()
}

impl VelocitySource for AnalyticField {
    fn geometry(&self) -> Geometry {
        self.geometry
    }

    fn knots(&self) -> &[f64] {
        &self.knots
    }

    fn velocity(&self, x: Point, t: f64) -> Result<Lookup> {
        bracket(&self.knots, t)?;
        if self.geometry == Geometry::Radial && x[0] > self.r_max {
            return Ok(Lookup::Outside);
        }
        Ok(Lookup::Inside((self.f)(x, t)))
    }
}
