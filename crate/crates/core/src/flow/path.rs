//! Particle paths `X(t; x0, t0) = x0 + int_{t0}^t u(X(s), s) ds`.

use serde::Serialize;

use super::source::{Geometry, Lookup, Point, VelocitySource};
use crate::error::{Error, Result};

/// Integrator sub-steps per snapshot interval.
pub const SUBSTEPS: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct ParticlePath {
    pub seed: Point,
    pub t0: f64,
    /// Samples `(t, X(t))`, starting with `(t0, seed)`. Backward paths have
    /// decreasing times.
    pub samples: Vec<(f64, Point)>,
    /// Velocity at each sample.
    pub velocities: Vec<Point>,
    pub steps: usize,
    /// Largest integrator step used.
    pub max_dt: f64,
    /// Set when the path left the domain; samples stop at the last inside
    /// position.
    pub exited: bool,
    /// `|X(t_end) - x0 - int u(X(s), s) ds|` with the integral taken by the
    /// trapezoid rule over the samples.
    pub residual: f64,
}

impl ParticlePath {
    pub fn end(&self) -> (f64, Point) {
        *self.samples.last().expect("paths hold their seed")
    }

    /// Position at a sample time, or `None` if that time was not sampled.
    pub fn at(&self, t: f64) -> Option<Point> {
        let tol = 1e-12 * t.abs().max(1.0);
        self.samples.iter().find(|(s, _)| (s - t).abs() <= tol).map(|(_, x)| *x)
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|(t, _)| *t).collect()
    }
}

fn add(x: Point, a: f64, v: Point) -> Point {
    [x[0] + a * v[0], x[1] + a * v[1]]
}

fn norm(v: Point) -> f64 {
    v[0].hypot(v[1])
}

fn clamp(geom: Geometry, x: Point) -> Point {
    match geom {
        Geometry::Radial => [x[0].max(0.0), 0.0],
        Geometry::Planar => x,
    }
}

/// Sub-step times from `t0` to `t1`: every knot in between is hit and each
/// knot interval is split into [`SUBSTEPS`] equal steps.
fn step_times(knots: &[f64], t0: f64, t1: f64) -> Vec<f64> {
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let mut marks = vec![lo];
    marks.extend(knots.iter().copied().filter(|&k| k > lo && k < hi));
    marks.push(hi);
    let mut out = vec![lo];
    for w in marks.windows(2) {
        // Full-interval spacing, so partial intervals keep the same step.
        let k = knots.partition_point(|&s| s <= w[0]).clamp(1, knots.len() - 1);
        let h = (knots[k] - knots[k - 1]) / SUBSTEPS as f64;
        let m = (((w[1] - w[0]) / h).ceil() as usize).max(1);
        for j in 1..m {
            out.push(w[0] + (w[1] - w[0]) * j as f64 / m as f64);
        }
        out.push(w[1]);
    }
    if t1 < t0 {
        out.reverse();
    }
    out
}

fn eval(src: &dyn VelocitySource, x: Point, t: f64) -> Result<Option<Point>> {
    Ok(match src.velocity(clamp(src.geometry(), x), t)? {
        Lookup::Inside(v) => Some(v),
        Lookup::Outside => None,
    })
}

/// Integrates one path with the classical four-stage Runge-Kutta method.
/// `t1 < t0` integrates backward through the same history.
pub fn integrate_path(src: &dyn VelocitySource, x0: Point, t0: f64, t1: f64) -> Result<ParticlePath> {
    let (a, b) = src.span();
    for t in [t0, t1] {
        if !(t >= a && t <= b) {
            return Err(Error::Domain(format!("time {t} outside the history span [{a}, {b}]")));
        }
    }
    let times = step_times(src.knots(), t0, t1);

    let mut path = ParticlePath {
        seed: x0,
        t0,
        samples: vec![(t0, x0)],
        velocities: Vec::new(),
        steps: 0,
        max_dt: 0.0,
        exited: false,
        residual: 0.0,
    };
    let Some(mut u_prev) = eval(src, x0, t0)? else {
        path.exited = true;
        return Ok(path);
    };
    let mut vels = vec![u_prev];
    let mut x = x0;

    for w in times.windows(2) {
        let Some((xn, un)) = rk4_step(src, x, u_prev, w[0], w[1])? else {
            path.exited = true;
            break;
        };
        x = xn;
        u_prev = un;
        path.samples.push((w[1], x));
        vels.push(un);
        path.steps += 1;
        path.max_dt = path.max_dt.max((w[1] - w[0]).abs());
    }

    let mut integral = [0.0; 2];
    for (i, w) in path.samples.windows(2).enumerate() {
        let h = w[1].0 - w[0].0;
        for d in 0..2 {
            integral[d] += 0.5 * h * (vels[i][d] + vels[i + 1][d]);
        }
    }
    path.velocities = vels;
    let end = path.end().1;
    path.residual = norm([end[0] - x0[0] - integral[0], end[1] - x0[1] - integral[1]]);
    Ok(path)
}

/// One step from `(x, t)` with `k1 = u(x, t)`; returns the new position and
/// the velocity there, or `None` if a stage left the domain.
fn rk4_step(src: &dyn VelocitySource, x: Point, k1: Point, t: f64, tn: f64) -> Result<Option<(Point, Point)>> {
    let dt = tn - t;
    let th = t + 0.5 * dt;
    let Some(k2) = eval(src, add(x, 0.5 * dt, k1), th)? else { return Ok(None) };
    let Some(k3) = eval(src, add(x, 0.5 * dt, k2), th)? else { return Ok(None) };
    let Some(k4) = eval(src, add(x, dt, k3), tn)? else { return Ok(None) };
    let mut xn = x;
    for d in 0..2 {
        xn[d] += dt / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
    }
    let xn = clamp(src.geometry(), xn);
    Ok(eval(src, xn, tn)?.map(|u| (xn, u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::source::{uniform_knots, AnalyticField};

    #[test]
    fn zero_and_constant_fields() {
        let z = AnalyticField::radial(uniform_knots(0.0, 1.0, 10), |_, _| 0.0).unwrap();
        let p = integrate_path(&z, [0.7, 0.0], 0.0, 1.0).unwrap();
        assert!(p.samples.iter().all(|(_, x)| x[0] == 0.7));
        assert_eq!(p.samples[0], (0.0, [0.7, 0.0]));

        let c = AnalyticField::planar(uniform_knots(0.0, 2.0, 8), |_, _| [0.5, -1.0]).unwrap();
        let p = integrate_path(&c, [1.0, 1.0], 0.5, 2.0).unwrap();
        let (t, x) = p.end();
        assert_eq!(t, 2.0);
        assert!((x[0] - 1.75).abs() < 1e-14 && (x[1] + 0.5).abs() < 1e-14);
    }

    #[test]
    fn expanding_field_doubles_radius() {
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 20), |r, t| r / (1.0 + t)).unwrap();
        let p = integrate_path(&f, [1.0, 0.0], 0.0, 1.0).unwrap();
        assert!((p.end().1[0] - 2.0).abs() < 1e-9);
        assert!(p.residual < 10.0 * p.max_dt * p.max_dt);
        assert_eq!(p.steps, 20 * SUBSTEPS);
    }

    #[test]
    fn backward_integration_inverts_forward() {
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 20), |r, t| r * (1.0 + t).sin()).unwrap();
        let fwd = integrate_path(&f, [0.8, 0.0], 0.1, 0.9).unwrap();
        let back = integrate_path(&f, fwd.end().1, 0.9, 0.1).unwrap();
        assert!((back.end().1[0] - 0.8).abs() < 1e-8);
        assert!(back.times().windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn inward_flow_clamps_at_axis() {
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 4), |_, _| -1.0).unwrap();
        let p = integrate_path(&f, [0.3, 0.0], 0.0, 1.0).unwrap();
        assert!(p.samples.iter().all(|(_, x)| x[0] >= 0.0));
        assert_eq!(p.end().1[0], 0.0);
    }

    #[test]
    fn leaving_the_domain_truncates() {
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 10), |_, _| 2.0)
            .unwrap()
            .with_r_max(1.5);
        let p = integrate_path(&f, [0.5, 0.0], 0.0, 1.0).unwrap();
        assert!(p.exited);
        assert!(p.end().1[0] <= 1.5);
        assert!(p.end().0 < 1.0);
    }

    #[test]
    fn times_outside_span_are_errors() {
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 4), |_, _| 0.0).unwrap();
        assert!(integrate_path(&f, [0.3, 0.0], 0.0, 1.5).is_err());
    }

    #[test]
    fn partial_intervals_keep_step_size() {
        let t = step_times(&uniform_knots(0.0, 1.0, 4), 0.1, 0.6);
        assert_eq!(t[0], 0.1);
        assert_eq!(*t.last().unwrap(), 0.6);
        assert!(t.contains(&0.25) && t.contains(&0.5));
        assert!(t.windows(2).all(|w| w[1] - w[0] <= 0.0625 + 1e-15));
    }
}
