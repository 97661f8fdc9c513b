//! Interface tracking and the homeomorphism / Hölder diagnostics.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::path::{integrate_path, ParticlePath};
use super::source::{Geometry, Lookup, Point, VelocitySource};
use crate::error::{Error, Result};
use crate::format::csv_row;

#[derive(Debug, Clone, Serialize)]
pub struct InterfaceTrack {
    pub times: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Particle started halfway between the interfaces.
    pub mid: Vec<f64>,
    /// Estimated first time with `a(t) >= b(t)`; the curves are cut there.
    pub collision: Option<f64>,
    pub exited: bool,
}

impl InterfaceTrack {
    /// `(a(t), b(t))` by linear interpolation; `None` outside the tracked span.
    pub fn at(&self, t: f64) -> Option<(f64, f64)> {
        let n = self.times.len();
        if n == 0 {
            return None;
        }
        let tol = 1e-12 * t.abs().max(1.0);
        if t < self.times[0] - tol || t > self.times[n - 1] + tol {
            return None;
        }
        if n == 1 {
            return Some((self.a[0], self.b[0]));
        }
        let k = self.times.partition_point(|&s| s <= t).clamp(1, n - 1) - 1;
        let w = ((t - self.times[k]) / (self.times[k + 1] - self.times[k])).clamp(0.0, 1.0);
        Some((
            (1.0 - w) * self.a[k] + w * self.a[k + 1],
            (1.0 - w) * self.b[k] + w * self.b[k + 1],
        ))
    }

    /// Position of the midpoint particle at `t`.
    pub fn mid_at(&self, t: f64) -> Option<f64> {
        let n = self.times.len();
        let tol = 1e-12 * t.abs().max(1.0);
        if n == 0 || t < self.times[0] - tol || t > self.times[n - 1] + tol {
            return None;
        }
        if n == 1 {
            return Some(self.mid[0]);
        }
        let k = self.times.partition_point(|&s| s <= t).clamp(1, n - 1) - 1;
        let w = ((t - self.times[k]) / (self.times[k + 1] - self.times[k])).clamp(0.0, 1.0);
        Some((1.0 - w) * self.mid[k] + w * self.mid[k + 1])
    }
}

/// Integrates `a' = v(a, t)`, `b' = v(b, t)` from the start of the history.
///
/// The curves are taken to meet once the gap is no larger than the distance
/// their closing speed covers in the next step; the meeting time is then
/// extrapolated at that closing speed.
pub fn track_interfaces(src: &dyn VelocitySource, a0: f64, b0: f64, t1: f64) -> Result<InterfaceTrack> {
    if !(a0 < b0) {
        return Err(Error::config("interfaces", format!("need a0 < b0, got {a0} and {b0}")));
    }
    let t0 = src.span().0;
    let pa = integrate_path(src, [a0, 0.0], t0, t1)?;
    let pb = integrate_path(src, [b0, 0.0], t0, t1)?;
    let pm = integrate_path(src, [0.5 * (a0 + b0), 0.0], t0, t1)?;
    let len = pa.samples.len().min(pb.samples.len()).min(pm.samples.len());

    let mut track = InterfaceTrack {
        times: Vec::with_capacity(len),
        a: Vec::with_capacity(len),
        b: Vec::with_capacity(len),
        mid: Vec::with_capacity(len),
        collision: None,
        exited: pa.exited || pb.exited,
    };
    for k in 0..len {
        let (t, a) = (pa.samples[k].0, pa.samples[k].1[0]);
        let b = pb.samples[k].1[0];
        track.times.push(t);
        track.a.push(a);
        track.b.push(b);
        track.mid.push(pm.samples[k].1[0]);
        let gap = b - a;
        if gap <= 0.0 {
            track.collision = Some(t);
            break;
        }
        let closing = pa.velocities[k][0] - pb.velocities[k][0];
        let h = if k + 1 < len { (pa.samples[k + 1].0 - t).abs() } else { 0.0 };
        if closing > 0.0 && gap <= closing * h {
            track.collision = Some(t + gap / closing);
            break;
        }
    }
    Ok(track)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingViolation {
    pub t: f64,
    /// Index `i` with `X_{i+1}(t) <= X_i(t)`.
    pub index: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub initial_min_gap: f64,
    pub min_gap: f64,
    pub min_gap_time: f64,
    pub violations: Vec<OrderingViolation>,
    /// Seeds whose paths left the domain before `t1`.
    pub exited: Vec<usize>,
}

impl OrderingReport {
    pub fn ordered(&self) -> bool {
        self.violations.is_empty() && self.min_gap > 0.0
    }
}

/// Checks that radial paths started from increasing seeds stay increasing.
pub fn ordering_check(src: &dyn VelocitySource, seeds: &[f64], t1: f64) -> Result<OrderingReport> {
    if seeds.len() < 2 || seeds.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("seeds", "need at least two strictly increasing seeds"));
    }
    let t0 = src.span().0;
    let paths: Vec<ParticlePath> = seeds
        .par_iter()
        .map(|&s| integrate_path(src, [s, 0.0], t0, t1))
        .collect::<Result<_>>()?;

    let mut rep = OrderingReport {
        initial_min_gap: seeds.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min),
        min_gap: f64::INFINITY,
        min_gap_time: t0,
        violations: Vec::new(),
        exited: paths.iter().enumerate().filter(|(_, p)| p.exited).map(|(i, _)| i).collect(),
    };
    for (i, w) in paths.windows(2).enumerate() {
        for (sa, sb) in w[0].samples.iter().zip(&w[1].samples) {
            let gap = sb.1[0] - sa.1[0];
            if gap < rep.min_gap {
                rep.min_gap = gap;
                rep.min_gap_time = sa.0;
            }
            if gap <= 0.0 {
                rep.violations.push(OrderingViolation { t: sa.0, index: i });
            }
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderRecord {
    pub t1: f64,
    pub t2: f64,
    /// Initial separation of the seed pair as a fraction of `|y2 - y1|`.
    pub fraction: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderFit {
    /// Smallest per-time-pair log-log slope of `d2` against `d1`, in `(0, 1]`.
    pub alpha: f64,
    /// Smallest `K` with `d2 <= K d1^alpha` over all records.
    pub k: f64,
    pub records: Vec<HolderRecord>,
}

/// Number of nested seed pairs: `y1` and `y1 + 2^-j (y2 - y1)`.
const HOLDER_LEVELS: usize = 7;

fn distance(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// Positions of a path at each grid time, or `None` once it exits.
fn positions_on_grid(src: &dyn VelocitySource, x0: Point, grid: &[f64]) -> Result<Vec<Option<Point>>> {
    let mut out = vec![Some(x0)];
    let mut x = x0;
    for w in grid.windows(2) {
        let p = integrate_path(src, x, w[0], w[1])?;
        if p.exited {
            out.resize(grid.len(), None);
            return Ok(out);
        }
        x = p.end().1;
        out.push(Some(x));
    }
    Ok(out)
}

/// Empirical Hölder exponent of the flow map between grid times.
///
/// For each pair `t1 < t2` the separations `d(t1)` and `d(t2)` of a nested
/// family of seed pairs are regressed in log-log form; the exponent is the
/// smallest slope over all time pairs, capped at 1.
pub fn holder_exponent_probe(src: &dyn VelocitySource, y1: Point, y2: Point, grid: &[f64]) -> Result<HolderFit> {
    if distance(y1, y2) == 0.0 {
        return Err(Error::config("holder", "seeds must differ"));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("holder", "time grid must be strictly increasing with two or more points"));
    }
    let fractions: Vec<f64> = (0..HOLDER_LEVELS).map(|j| 0.5f64.powi(j as i32)).collect();
    let base = positions_on_grid(src, y1, grid)?;
    let others: Vec<Vec<Option<Point>>> = fractions
        .par_iter()
        .map(|&s| {
            let y = [y1[0] + s * (y2[0] - y1[0]), y1[1] + s * (y2[1] - y1[1])];
            positions_on_grid(src, y, grid)
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut alpha = 1.0f64;
    for i in 0..grid.len() {
        for j in (i + 1)..grid.len() {
            let mut pts = Vec::new();
            for (s, o) in fractions.iter().zip(&others) {
                if let (Some(b1), Some(b2), Some(o1), Some(o2)) = (base[i], base[j], o[i], o[j]) {
                    let (d1, d2) = (distance(b1, o1), distance(b2, o2));
                    if d1 > 0.0 && d2 > 0.0 {
                        records.push(HolderRecord { t1: grid[i], t2: grid[j], fraction: *s, d1, d2 });
                        pts.push((d1.ln(), d2.ln()));
                    }
                }
            }
            if let Some(slope) = ls_slope(&pts) {
                alpha = alpha.min(slope);
            }
        }
    }
    let alpha = alpha.max(f64::MIN_POSITIVE);
    let k = records.iter().map(|r| r.d2 / r.d1.powf(alpha)).fold(0.0, f64::max);
    Ok(HolderFit { alpha, k, records })
}

fn ls_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 1e-20).then(|| sxy / sxx)
}

/// `m(x) = x (1 - ln x)` for `x <= 1`, `x` otherwise.
pub fn log_lipschitz_modulus(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("modulus needs x > 0, got {x}")));
    }
    Ok(if x <= 1.0 { x * (1.0 - x.ln()) } else { x })
}

/// `int |u(X2, t) - u(X1, t)| / m(|X2 - X1|) dt` along two paths sampled at
/// the same times (trapezoid rule).
pub fn osgood_integral(src: &dyn VelocitySource, p1: &ParticlePath, p2: &ParticlePath) -> Result<f64> {
    let mut prev: Option<(f64, f64)> = None;
    let mut acc = 0.0;
    for (s1, s2) in p1.samples.iter().zip(&p2.samples) {
        if (s1.0 - s2.0).abs() > 1e-12 * s1.0.abs().max(1.0) {
            return Err(Error::config("paths", "paths are not sampled at common times"));
        }
        let (Lookup::Inside(u1), Lookup::Inside(u2)) = (src.velocity(s1.1, s1.0)?, src.velocity(s2.1, s2.0)?) else {
            break;
        };
        let d = distance(s1.1, s2.1);
        if d == 0.0 {
            break;
        }
        let g = distance(u1, u2) / log_lipschitz_modulus(d)?;
        if let Some((tp, gp)) = prev {
            acc += 0.5 * (s1.0 - tp).abs() * (g + gp);
        }
        prev = Some((s1.0, g));
    }
    Ok(acc)
}

/// CSV with columns `t,X` (radial) or `t,X,Y` (planar).
pub fn write_path_csv(path: &Path, p: &ParticlePath, geometry: Geometry) -> Result<()> {
    let mut out = String::from(match geometry {
        Geometry::Radial => "t,X\n",
        Geometry::Planar => "t,X,Y\n",
    });
    for (t, x) in &p.samples {
        let row = match geometry {
            Geometry::Radial => csv_row(&[*t, x[0]]),
            Geometry::Planar => csv_row(&[*t, x[0], x[1]]),
        };
        out.push_str(&row);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// CSV with columns `t,a,b,collision_flag`; the flag is 1 on the sample
/// where the curves meet.
pub fn write_interfaces_csv(path: &Path, track: &InterfaceTrack) -> Result<()> {
    let mut out = String::from("t,a,b,collision_flag\n");
    let last = track.times.len().saturating_sub(1);
    for k in 0..track.times.len() {
        let flag = u8::from(track.collision.is_some() && k == last);
        out.push_str(&format!("{},{flag}\n", csv_row(&[track.times[k], track.a[k], track.b[k]])));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::source::{uniform_knots, AnalyticField};

    #[test]
    fn modulus_values() {
        assert_eq!(log_lipschitz_modulus(1.0).unwrap(), 1.0);
        let e = std::f64::consts::E;
        assert!((log_lipschitz_modulus(1.0 / e).unwrap() - 2.0 / e).abs() < 1e-15);
        assert_eq!(log_lipschitz_modulus(2.0).unwrap(), 2.0);
        assert!(log_lipschitz_modulus(0.0).is_err());
    }

    #[test]
    fn static_interfaces() {
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 5), |_, _| 0.0).unwrap();
        let tr = track_interfaces(&f, 1.0, 2.0, 1.0).unwrap();
        assert!(tr.a.iter().all(|&a| a == 1.0) && tr.b.iter().all(|&b| b == 2.0));
        assert!(tr.collision.is_none());
    }

    #[test]
    fn exponential_interfaces() {
        let k = 0.7;
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 20), move |r, _| k * r).unwrap();
        let tr = track_interfaces(&f, 1.0, 1.5, 1.0).unwrap();
        for (i, t) in tr.times.iter().enumerate() {
            assert!((tr.a[i] - (k * t).exp()).abs() < 1e-8);
            assert!((tr.b[i] - 1.5 * (k * t).exp()).abs() < 1e-8);
        }
        assert!(tr.collision.is_none());
    }

    #[test]
    fn converging_fluids_collide() {
        // Inner fluid moves out at speed 1, outer fluid in at speed 1; the
        // straight paths a = 1 + t, b = 2 - t meet at t = 1/2.
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 40), |r, _| if r < 1.5 { 1.0 } else { -1.0 }).unwrap();
        let tr = track_interfaces(&f, 1.0, 2.0, 1.0).unwrap();
        let tc = tr.collision.expect("collision");
        let h = 1.0 / 40.0 / 4.0;
        assert!((tc - 0.5).abs() <= h, "{tc}");
    }

    #[test]
    fn ordering_under_expansion_and_compression() {
        let k = 0.5;
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 10), move |r, _| k * r).unwrap();
        let rep = ordering_check(&f, &[0.5, 1.0, 1.2], 1.0).unwrap();
        assert!(rep.ordered());
        assert!((rep.min_gap - 0.2).abs() < 1e-12);

        // v = -r^2: gap ODE shrinks the gap but never closes it.
        let g = AnalyticField::radial(uniform_knots(0.0, 1.0, 10), |r, _| -r * r).unwrap();
        let rep = ordering_check(&g, &[1.0, 1.1], 1.0).unwrap();
        assert!(rep.ordered());
        // r(t) = r0 / (1 + r0 t)
        let exact = 1.1 / 2.1 - 0.5;
        assert!((rep.min_gap - exact).abs() < 1e-8);
        assert!(rep.min_gap < rep.initial_min_gap);
    }

    #[test]
    fn holder_fit_for_zero_and_linear_fields() {
        let grid = uniform_knots(0.0, 1.0, 5);
        let z = AnalyticField::radial(uniform_knots(0.0, 1.0, 10), |_, _| 0.0).unwrap();
        let fit = holder_exponent_probe(&z, [1.0, 0.0], [1.5, 0.0], &grid).unwrap();
        assert!((fit.alpha - 1.0).abs() < 1e-12);
        assert!((fit.k - 1.0).abs() < 1e-12);

        let k = 0.4;
        let e = AnalyticField::radial(uniform_knots(0.0, 1.0, 10), move |r, _| k * r).unwrap();
        let fit = holder_exponent_probe(&e, [1.0, 0.0], [1.5, 0.0], &grid).unwrap();
        assert!((fit.alpha - 1.0).abs() < 1e-6);
        assert!((fit.k - k.exp()).abs() < 1e-6);
    }

    #[test]
    fn csv_dumps() {
        let dir = tempfile::tempdir().unwrap();
        let f = AnalyticField::radial(uniform_knots(0.0, 1.0, 2), |_, _| 1.0).unwrap();
        let p = integrate_path(&f, [0.5, 0.0], 0.0, 1.0).unwrap();
        let file = dir.path().join("p.csv");
        write_path_csv(&file, &p, Geometry::Radial).unwrap();
        let text = fs::read_to_string(&file).unwrap();
        assert!(text.starts_with("t,X\n"));
        assert_eq!(text.lines().count(), 1 + p.samples.len());

        let tr = track_interfaces(&f, 0.5, 0.9, 1.0).unwrap();
        let file = dir.path().join("i.csv");
        write_interfaces_csv(&file, &tr).unwrap();
        assert!(fs::read_to_string(&file).unwrap().starts_with("t,a,b,collision_flag\n"));
    }
}
