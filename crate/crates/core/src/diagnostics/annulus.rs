//! Velocity law inside a vacuum annulus and the inner-fluid energy identity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::InterfaceTrack;
use crate::format::CsvTable;
use crate::material::MaterialLaw;
use crate::radial::{RadialState, RunOutput};

/// Fewest vacuum cells for a meaningful fit.
pub const MIN_VACUUM_CELLS: usize = 6;

/// Least-squares fit of `v = alpha r + beta / r`; returns `(alpha, beta, rms)`.
pub fn fit_annulus_law(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::config("annulus", "need at least two samples"));
    }
    let (mut srr, mut s11, mut sii, mut srv, mut siv) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(r, v) in points {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("fit radius must be > 0, got {r}")));
        }
        srr += r * r;
        s11 += 1.0;
        sii += 1.0 / (r * r);
        srv += r * v;
        siv += v / r;
    }
    let det = srr * sii - s11 * s11;
    if det.abs() <= 1e-14 * srr * sii {
        return Err(Error::Domain("fit radii are not distinct".into()));
    }
    let alpha = (srv * sii - s11 * siv) / det;
    let beta = (srr * siv - s11 * srv) / det;
    let ss: f64 = points.iter().map(|&(r, v)| (v - alpha * r - beta / r).powi(2)).sum();
    Ok((alpha, beta, (ss / points.len() as f64).sqrt()))
}

/// `2 (a v_a - b v_b) / (a^2 - b^2)`, the divergence at the inner edge of the
/// annulus implied by the interface velocities.
pub fn interface_divergence(a: f64, b: f64, va: f64, vb: f64) -> f64 {
    2.0 * (a * va - b * vb) / (a * a - b * b)
}

#[derive(Debug, Clone, Serialize)]
pub struct AnnulusFit {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rms: f64,
    pub max_v: f64,
    pub samples: usize,
    /// Fitted `2 alpha`.
    pub stress_rate: f64,
    /// [`interface_divergence`] from `v(a)` and `v(b)`.
    pub interface_rate: f64,
    pub rel_diff: f64,
}

impl AnnulusFit {
    pub fn rms_rel(&self) -> f64 {
        if self.max_v > 0.0 {
            self.rms / self.max_v
        } else {
            self.rms
        }
    }
}

/// Fits the annulus law to the velocity on faces between flagged vacuum
/// cells (`rho <= eps_vac`) inside `[a, b]`. Returns `Ok(None)` when fewer
/// than [`MIN_VACUUM_CELLS`] vacuum cells are available.
pub fn annulus_velocity_check(st: &RadialState, a: f64, b: f64, eps_vac: f64) -> Result<Option<AnnulusFit>> {
    let g = st.grid;
    let vac = |i: usize| st.rho[i] <= eps_vac && g.center(i) > a && g.center(i) < b;
    let cells = (0..st.n_cells()).filter(|&i| vac(i)).count();
    if cells < MIN_VACUUM_CELLS {
        return Ok(None);
    }
    let points: Vec<(f64, f64)> = (1..st.n_cells())
        .filter(|&k| vac(k - 1) && vac(k))
        .map(|k| (g.face(k), st.v[k]))
        .collect();
    let (alpha, beta, rms) = fit_annulus_law(&points)?;
    let max_v = points.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let va = st.velocity_at(a).ok_or_else(|| Error::Domain(format!("a = {a} outside the grid")))?;
    let vb = st.velocity_at(b).ok_or_else(|| Error::Domain(format!("b = {b} outside the grid")))?;
    let interface_rate = interface_divergence(a, b, va, vb);
    let stress_rate = 2.0 * alpha;
    let scale = stress_rate.abs().max(interface_rate.abs());
    Ok(Some(AnnulusFit {
        t: st.t,
        a,
        b,
        alpha,
        beta,
        rms,
        max_v,
        samples: points.len(),
        stress_rate,
        interface_rate,
        rel_diff: if scale > 0.0 { (stress_rate - interface_rate).abs() / scale } else { 0.0 },
    }))
}

/// Right side of the inner-fluid energy identity,
/// `2 (lambda(0) + 2 mu) a v_a (a v_a - b v_b) / (a^2 - b^2)`.
pub fn two_fluid_rhs(law: &MaterialLaw, a: f64, b: f64, va: f64, vb: f64) -> f64 {
    2.0 * (law.lam(0.0) + 2.0 * law.mu) * a * va * (a * va - b * vb) / (a * a - b * b)
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoFluidRecord {
    pub times: Vec<f64>,
    pub a: Vec<f64>,
    pub mid: Vec<f64>,
    /// `int_0^mid (rho v^2/2 + Gbar(rho)) r dr + int_0^t D_inner`.
    pub energy: Vec<f64>,
    /// Dissipation over `r < a`.
    pub dissipation: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Samples with a full averaging window on both sides.
    pub centers: Vec<usize>,
    /// `(E(t + w) - E(t - w)) / 2w` at each center.
    pub de_dt: Vec<f64>,
    /// Trapezoidal mean of `rhs` over the same window.
    pub rhs_mean: Vec<f64>,
    pub residual: Vec<f64>,
    /// `max(|dE/dt|, |rhs_mean|, mean D_inner)`.
    pub scale: Vec<f64>,
    pub max_rel_residual: f64,
    pub truncated_at: Option<f64>,
}

impl TwoFluidRecord {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&[
            "t",
            "a",
            "mid",
            "energy",
            "dissipation",
            "rhs",
            "de_dt",
            "rhs_mean",
            "residual",
            "scale",
        ]);
        for (j, &k) in self.centers.iter().enumerate() {
            t.push(vec![
                self.times[k],
                self.a[k],
                self.mid[k],
                self.energy[k],
                self.dissipation[k],
                self.rhs[k],
                self.de_dt[j],
                self.rhs_mean[j],
                self.residual[j],
                self.scale[j],
            ]);
        }
        t
    }
}

/// Cell-wise integral of `f(cell)` over `r < edge` in the `r dr` measure,
/// with the cell containing `edge` counted fractionally.
fn integral_below(st: &RadialState, edge: f64, f: impl Fn(usize) -> f64) -> f64 {
    let g = st.grid;
    let dr = g.dr();
    let mut acc = 0.0;
    for i in 0..st.n_cells() {
        let frac = ((edge - g.face(i)) / dr).clamp(0.0, 1.0);
        if frac == 0.0 {
            break;
        }
        acc += frac * g.center(i) * dr * f(i);
    }
    acc
}

fn trapezoid(t: &[f64], y: &[f64]) -> f64 {
    (1..t.len()).map(|k| 0.5 * (t[k] - t[k - 1]) * (y[k] + y[k - 1])).sum()
}

/// Checks `dE/dt` of the inner fluid against the interface formula over the
/// snapshots up to `t_window` (or the collision time).
///
/// The energy is integrated up to the midpoint particle of the annulus, so
/// the whole inner fluid is enclosed however the discrete edge is smeared;
/// the vacuum in between only adds `O(delta)`. Rates are compared as means
/// over `[t - half_width, t + half_width]`.
pub fn two_fluid_energy_balance(
    run: &RunOutput,
    law: &MaterialLaw,
    track: &InterfaceTrack,
    t_window: f64,
    half_width: f64,
) -> Result<TwoFluidRecord> {
    if !(law.gamma > 1.0) {
        return Err(Error::Hypothesis {
            hypothesis: "gamma > 1",
            message: "the inner-fluid energy uses Gbar".into(),
        });
    }
    if !(half_width > 0.0) {
        return Err(Error::config("diagnostics.two_fluid_half_width", "must be > 0"));
    }
    let mut rec = TwoFluidRecord {
        times: Vec::new(),
        a: Vec::new(),
        mid: Vec::new(),
        energy: Vec::new(),
        dissipation: Vec::new(),
        rhs: Vec::new(),
        centers: Vec::new(),
        de_dt: Vec::new(),
        rhs_mean: Vec::new(),
        residual: Vec::new(),
        scale: Vec::new(),
        max_rel_residual: 0.0,
        truncated_at: None,
    };
    let gbar = 1.0 / (law.gamma - 1.0);
    let mut cum = 0.0;
    for st in &run.snapshots {
        if st.t > t_window + 1e-12 {
            break;
        }
        let (Some((a, b)), Some(m)) = (track.at(st.t), track.mid_at(st.t)) else {
            rec.truncated_at = Some(st.t);
            break;
        };
        let e = integral_below(st, m, |i| {
            let vc = 0.5 * (st.v[i] + st.v[i + 1]);
            0.5 * st.rho[i] * vc * vc + gbar * law.p(st.rho[i])
        });
        let d = integral_below(st, a, |i| law.long_visc(st.rho[i]) * st.cell_divergence(i).powi(2));
        if let (Some(&tp), Some(&dp)) = (rec.times.last(), rec.dissipation.last()) {
            cum += 0.5 * (st.t - tp) * (d + dp);
        }
        let va = st.velocity_at(a).unwrap_or(0.0);
        let vb = st.velocity_at(b).unwrap_or(0.0);
        rec.times.push(st.t);
        rec.a.push(a);
        rec.mid.push(m);
        rec.energy.push(e + cum);
        rec.dissipation.push(d);
        rec.rhs.push(two_fluid_rhs(law, a, b, va, vb));
    }
    let n = rec.times.len();
    let (t0, t1) = (rec.times.first().copied().unwrap_or(0.0), rec.times.last().copied().unwrap_or(0.0));
    let tol = 1e-9 * half_width;
    for k in 0..n {
        let tk = rec.times[k];
        if tk - half_width < t0 - tol || tk + half_width > t1 + tol {
            continue;
        }
        let lo = rec.times.partition_point(|&s| s < tk - half_width - tol);
        let hi = rec.times.partition_point(|&s| s <= tk + half_width + tol) - 1;
        if hi < lo + 2 {
            continue;
        }
        let span = rec.times[hi] - rec.times[lo];
        let de = (rec.energy[hi] - rec.energy[lo]) / span;
        let r_mean = trapezoid(&rec.times[lo..=hi], &rec.rhs[lo..=hi]) / span;
        let d_mean = trapezoid(&rec.times[lo..=hi], &rec.dissipation[lo..=hi]) / span;
        let res = de - r_mean;
        let scale = de.abs().max(r_mean.abs()).max(d_mean);
        rec.centers.push(k);
        rec.de_dt.push(de);
        rec.rhs_mean.push(r_mean);
        rec.residual.push(res);
        rec.scale.push(scale);
        if scale > 0.0 {
            rec.max_rel_residual = rec.max_rel_residual.max(res.abs() / scale);
        }
    }
    if rec.centers.is_empty() {
        return Err(Error::config(
            "diagnostics.two_fluid_half_width",
            "no sample has a full averaging window; lower the half width or add snapshots",
        ));
    }
    Ok(rec)
}
