//! Density discontinuities: one-sided limits, brackets and the
//! Rankine-Hugoniot residual.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::CsvTable;
use crate::material::MaterialLaw;
use crate::radial::RadialState;

#[derive(Debug, Clone, Serialize)]
pub struct JumpRecord {
    pub t: f64,
    /// Location of the discontinuity.
    pub r: f64,
    /// Nearest face index.
    pub face: usize,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub divu_minus: f64,
    pub divu_plus: f64,
    /// `[P] = P(rho+) - P(rho-)`.
    pub jump_p: f64,
    /// `[Lambda]`.
    pub jump_lambda: f64,
    /// `[(2 mu + lambda) div u]`.
    pub jump_stress: f64,
    /// `[(2 mu + lambda) div u] - [P]`.
    pub rh_residual: f64,
    /// `[P] / [Lambda]`, absent when `[Lambda] = 0`.
    pub a: Option<f64>,
}

impl JumpRecord {
    /// Builds the brackets from one-sided states; `-` is the inner side.
    pub fn from_states(
        law: &MaterialLaw,
        t: f64,
        r: f64,
        face: usize,
        (rho_minus, divu_minus): (f64, f64),
        (rho_plus, divu_plus): (f64, f64),
    ) -> Result<Self> {
        for v in [rho_minus, rho_plus, divu_minus, divu_plus] {
            if !v.is_finite() {
                return Err(Error::Integrity(format!("non-finite one-sided state near r = {r}")));
            }
        }
        let jump_p = law.pressure(rho_plus)? - law.pressure(rho_minus)?;
        let jump_lambda = law.big_lambda(rho_plus)? - law.big_lambda(rho_minus)?;
        let jump_stress = law.long_visc(rho_plus) * divu_plus - law.long_visc(rho_minus) * divu_minus;
        Ok(JumpRecord {
            t,
            r,
            face,
            rho_minus,
            rho_plus,
            divu_minus,
            divu_plus,
            jump_p,
            jump_lambda,
            jump_stress,
            rh_residual: jump_stress - jump_p,
            a: (jump_lambda != 0.0).then(|| jump_p / jump_lambda),
        })
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct JumpScan {
    pub jumps: Vec<JumpRecord>,
    /// Flagged discontinuities that could not be measured.
    pub notes: Vec<String>,
}

/// Least-squares line through `f` on `cells`, evaluated at `r`.
fn fit_extrapolate(st: &RadialState, f: &impl Fn(usize) -> f64, cells: std::ops::RangeInclusive<usize>, r: f64) -> f64 {
    let m = cells.clone().count() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for i in cells {
        let (x, y) = (st.grid.center(i) - r, f(i));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let det = m * sxx - sx * sx;
    (sy * sxx - sx * sxy) / det
}

/// One-sided states at `r` for a discontinuity spanning faces
/// `k_left..=k_right`. Each side is fitted by a straight line over a window
/// as wide as the transition (at least two cells), starting at the second
/// cell beyond it.
fn one_sided(st: &RadialState, k_left: usize, k_right: usize, r: f64) -> Option<((f64, f64), (f64, f64))> {
    let n = st.n_cells();
    let w = (k_right - k_left + 1).max(2);
    if k_left < w + 1 || k_right + w >= n {
        return None;
    }
    let rho = |i: usize| st.rho[i];
    let div = |i: usize| st.cell_divergence(i);
    let left = (k_left - 1 - w)..=(k_left - 2);
    let right = (k_right + 1)..=(k_right + w);
    Some((
        (fit_extrapolate(st, &rho, left.clone(), r), fit_extrapolate(st, &div, left, r)),
        (fit_extrapolate(st, &rho, right.clone(), r), fit_extrapolate(st, &div, right, r)),
    ))
}

/// Faces whose density step exceeds this fraction of the steepest step
/// belong to the smeared transition.
pub const TAIL_FRACTION: f64 = 0.02;
/// Half-width of the window searched for the steepest face around a
/// tracked position.
pub const SEARCH_CELLS: usize = 4;

/// Grows the transition around face `steep` while neighbouring steps stay
/// above `TAIL_FRACTION` of its own.
fn transition(st: &RadialState, steep: usize) -> (usize, usize) {
    let n = st.n_cells();
    let diff = |k: usize| (st.rho[k] - st.rho[k - 1]).abs();
    let cut = TAIL_FRACTION * diff(steep);
    let (mut lo, mut hi) = (steep, steep);
    while lo > 1 && diff(lo - 1) > cut {
        lo -= 1;
    }
    while hi + 1 < n && diff(hi + 1) > cut {
        hi += 1;
    }
    (lo, hi)
}

/// Bracket record for a discontinuity tracked to lie near `r`.
///
/// The steepest face within [`SEARCH_CELLS`] of `r` anchors the transition;
/// one-sided states are extrapolated to `r` from beyond its smeared tails.
pub fn jump_at(st: &RadialState, law: &MaterialLaw, r: f64) -> Result<JumpRecord> {
    let n = st.n_cells();
    let k = st.grid.nearest_face(r);
    let lo = k.saturating_sub(SEARCH_CELLS).max(1);
    let hi = (k + SEARCH_CELLS).min(n - 1);
    let steep = (lo..=hi)
        .max_by(|&a, &b| (st.rho[a] - st.rho[a - 1]).abs().total_cmp(&(st.rho[b] - st.rho[b - 1]).abs()))
        .unwrap_or(k);
    let (first, last) = transition(st, steep);
    let (minus, plus) = one_sided(st, first, last, r)
        .ok_or_else(|| Error::Domain(format!("jump at r = {r} is too close to the domain edge")))?;
    JumpRecord::from_states(law, st.t, r, steep, minus, plus)
}

/// Flags faces with `|rho_i - rho_{i-1}| > kappa rho_bar`; contiguous flagged
/// faces form one discontinuity located at its steepest face, widened by
/// its smeared tails before extrapolating.
pub fn detect_jumps(st: &RadialState, law: &MaterialLaw, kappa: f64) -> Result<JumpScan> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::config("kappa", "must lie in (0, 1)"));
    }
    let n = st.n_cells();
    let thresh = kappa * law.rho_bar;
    let diff = |k: usize| (st.rho[k] - st.rho[k - 1]).abs();
    let mut scan = JumpScan::default();
    let mut k = 1;
    while k < n {
        if diff(k) <= thresh {
            k += 1;
            continue;
        }
        let first = k;
        while k + 1 < n && diff(k + 1) > thresh {
            k += 1;
        }
        let last = k;
        let steep = (first..=last).max_by(|&a, &b| diff(a).total_cmp(&diff(b))).unwrap();
        let r = st.grid.face(steep);
        let (lo, hi) = transition(st, steep);
        let (first, last) = (first.min(lo), last.max(hi));
        k = last;
        match one_sided(st, first, last, r) {
            Some((minus, plus)) => scan.jumps.push(JumpRecord::from_states(law, st.t, r, steep, minus, plus)?),
            None => scan.notes.push(format!("jump at r = {r} skipped: too close to the domain edge")),
        }
        k += 1;
    }
    Ok(scan)
}

pub fn jumps_csv(records: &[JumpRecord]) -> CsvTable {
    let mut t = CsvTable::new(&[
        "t",
        "r",
        "rho_minus",
        "rho_plus",
        "divu_minus",
        "divu_plus",
        "jump_p",
        "jump_lambda",
        "jump_stress",
        "rh_residual",
        "a",
    ]);
    for j in records {
        t.push(vec![
            j.t,
            j.r,
            j.rho_minus,
            j.rho_plus,
            j.divu_minus,
            j.divu_plus,
            j.jump_p,
            j.jump_lambda,
            j.jump_stress,
            j.rh_residual,
            j.a.unwrap_or(f64::NAN),
        ]);
    }
    t
}

/// A snapshot with `rho = rho_minus` inside `r_jump` and `rho_plus` outside,
/// whose discrete divergence equals `divu_minus` / `divu_plus` exactly on
/// each side. The velocity is continuous: `v = (divu/2) r + beta / r`.
pub fn manufactured_jump(
    grid: crate::radial::RadialGrid,
    face: usize,
    (rho_minus, divu_minus): (f64, f64),
    (rho_plus, divu_plus): (f64, f64),
) -> RadialState {
    let rj = grid.face(face);
    let n = grid.n_cells;
    let mut st = RadialState::uniform(grid, rho_plus, 0.0);
    for i in 0..face {
        st.rho[i] = rho_minus;
    }
    let (al, ar) = (0.5 * divu_minus, 0.5 * divu_plus);
    // Continuity at rj: al rj = ar rj + beta / rj.
    let beta = (al - ar) * rj * rj;
    for k in 1..n {
        let r = grid.face(k);
        st.v[k] = if k <= face { al * r } else { ar * r + beta / r };
    }
    st
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialGrid;

    #[test]
    fn smooth_snapshot_has_no_jumps() {
        let law = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 128).unwrap();
        let mut st = RadialState::uniform(g, 1.0, 0.0);
        for i in 0..128 {
            st.rho[i] = 1.0 + 0.5 * (-(g.center(i) - 2.0).powi(2)).exp();
        }
        assert!(detect_jumps(&st, &law, 0.05).unwrap().jumps.is_empty());
    }

    #[test]
    fn manufactured_states_satisfy_rankine_hugoniot() {
        let law = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 128).unwrap();
        let st = manufactured_jump(g, 40, (1.0, 0.0), (2.0, 0.5));
        let scan = detect_jumps(&st, &law, 0.1).unwrap();
        assert_eq!(scan.jumps.len(), 1);
        let j = &scan.jumps[0];
        assert_eq!(j.face, 40);
        assert!((j.rho_minus - 1.0).abs() < 1e-14 && (j.rho_plus - 2.0).abs() < 1e-14);
        assert!((j.divu_plus - 0.5).abs() < 1e-12 && j.divu_minus.abs() < 1e-12);
        assert!(j.rh_residual.abs() < 1e-12, "{}", j.rh_residual);

        let st = manufactured_jump(g, 40, (1.0, 0.0), (2.0, 0.6));
        let j = jump_at(&st, &law, g.face(40)).unwrap();
        assert!((j.rh_residual - 0.6).abs() < 1e-12);
    }

    #[test]
    fn bracket_values() {
        let law = MaterialLaw::default();
        let j = JumpRecord::from_states(&law, 0.0, 1.0, 0, (1.0, 0.0), (2.0, 0.0)).unwrap();
        let lam = 2.0 * 2f64.ln() + 1.5;
        assert!((j.jump_lambda - lam).abs() < 1e-14);
        assert!((j.a.unwrap() - 3.0 / lam).abs() < 1e-14);
    }

    #[test]
    fn edge_jumps_are_noted_not_measured() {
        let law = MaterialLaw::default();
        let g = RadialGrid::new(4.0, 64).unwrap();
        let st = manufactured_jump(g, 2, (2.0, 0.0), (1.0, 0.0));
        let scan = detect_jumps(&st, &law, 0.1).unwrap();
        assert!(scan.jumps.is_empty());
        assert_eq!(scan.notes.len(), 1);
    }
}
