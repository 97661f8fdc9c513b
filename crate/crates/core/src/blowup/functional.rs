//! The virial-type functional
//! `H(t) = int (x - (1+t) u)^2 rho dx + 2/(gamma-1) (1+t)^2 int A rho^gamma dx`
//! and the differential inequality it satisfies for compactly supported
//! data. All integrals use `dx = 2 pi r dr`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::material::MaterialLaw;
use crate::quadrature::adaptive_simpson;
use crate::radial::{DensityProfile, RadialState, RunOutput, VelocityProfile};

pub const HYPOTHESIS: &str = "blow-up hypothesis: gamma > 1, 1 < beta <= gamma, A > 0, c > 0";

fn require_gamma(law: &MaterialLaw) -> Result<()> {
    if law.gamma > 1.0 {
        Ok(())
    } else {
        Err(Error::config(
            "law.gamma",
            "the blow-up functional needs gamma > 1 (coefficient 2/(gamma-1))",
        ))
    }
}

/// Checks the parameter hypotheses under which the functional decays.
pub fn require_blowup_hypotheses(law: &MaterialLaw) -> Result<()> {
    let ok = law.gamma > 1.0
        && law.beta > 1.0
        && law.beta <= law.gamma
        && law.a > 0.0
        && law.c_lam > 0.0;
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis {
            hypothesis: HYPOTHESIS,
            message: format!(
                "got gamma = {}, beta = {}, A = {}, c = {}",
                law.gamma, law.beta, law.a, law.c_lam
            ),
        })
    }
}

#[inline]
fn cell_velocity(st: &RadialState, i: usize) -> f64 {
    0.5 * (st.v[i] + st.v[i + 1])
}

/// `H(t)` of a snapshot by the midpoint rule, velocity averaged to cells.
pub fn h_functional(st: &RadialState, law: &MaterialLaw, t: f64) -> Result<f64> {
    require_gamma(law)?;
    let k = 2.0 * law.a / (law.gamma - 1.0) * (1.0 + t).powi(2);
    Ok((0..st.n_cells())
        .map(|i| {
            let rho = st.rho[i].max(0.0);
            let x = st.grid.center(i) - (1.0 + t) * cell_velocity(st, i);
            (x * x * rho + k * rho.powf(law.gamma)) * st.grid.cell_area(i)
        })
        .sum())
}

/// `H(t)` of analytic radial data by adaptive quadrature over the support.
pub fn h_functional_profile(
    law: &MaterialLaw,
    density: &DensityProfile,
    velocity: &VelocityProfile,
    t: f64,
    tol: f64,
) -> Result<f64> {
    require_gamma(law)?;
    let r_sup = density
        .support_radius()
        .ok_or_else(|| Error::Unsupported("H needs compactly supported density".into()))?;
    let k = 2.0 * law.a / (law.gamma - 1.0) * (1.0 + t).powi(2);
    let mut cuts: Vec<f64> = density
        .breakpoints()
        .iter()
        .chain(velocity.breakpoints())
        .copied()
        .filter(|b| *b > 0.0 && *b < r_sup)
        .collect();
    cuts.push(0.0);
    cuts.push(r_sup);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let f = |r: f64| {
        let rho = density.eval(r);
        let x = r - (1.0 + t) * velocity.eval(r);
        (x * x * rho + k * rho.powf(law.gamma)) * 2.0 * PI * r
    };
    let n = (cuts.len() - 1).max(1) as f64;
    Ok(cuts
        .windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], tol / n).value)
        .sum())
}

/// Area of `{rho > threshold}`.
pub fn support_area(st: &RadialState, threshold: f64) -> f64 {
    (0..st.n_cells())
        .filter(|&i| st.rho[i] > threshold)
        .map(|i| st.grid.cell_area(i))
        .sum()
}

fn rho_gamma_integral(st: &RadialState, law: &MaterialLaw) -> f64 {
    (0..st.n_cells())
        .map(|i| st.rho[i].max(0.0).powf(law.gamma) * st.grid.cell_area(i))
        .sum()
}

/// `2 pi r_max^2 sigma(r_max)`: the virial contribution of the viscous stress
/// at the outer wall. Zero on the whole plane when `u = 0` outside the
/// support; on the truncated domain the vacuum velocity `alpha r + beta/r`
/// carries a nonzero stress out to the wall.
pub fn wall_stress_term(st: &RadialState, law: &MaterialLaw) -> f64 {
    let n = st.n_cells();
    let sigma = law.long_visc(st.rho[n - 1].max(0.0)) * st.cell_divergence(n - 1);
    2.0 * PI * st.grid.r_max.powi(2) * sigma
}

/// `H'(t)` for an exact solution on the truncated domain:
/// `4(2-gamma)(1+t)/(gamma-1) int A rho^gamma + 4(1+t) int lambda div u
///  - 2(1+t)^2 int (lambda + 2 mu)(div u)^2 - 2(1+t) W`
/// with `W` the wall term of [`wall_stress_term`].
pub fn h_derivative_formula(st: &RadialState, law: &MaterialLaw, t: f64) -> Result<f64> {
    require_gamma(law)?;
    let s = 1.0 + t;
    let mut lam_div = 0.0;
    let mut diss = 0.0;
    for i in 0..st.n_cells() {
        let rho = st.rho[i].max(0.0);
        let d = st.cell_divergence(i);
        let area = st.grid.cell_area(i);
        lam_div += law.lam(rho) * d * area;
        diss += law.long_visc(rho) * d * d * area;
    }
    let pot = law.a * rho_gamma_integral(st, law);
    Ok(4.0 * (2.0 - law.gamma) * s / (law.gamma - 1.0) * pot + 4.0 * s * lam_div
        - 2.0 * s * s * diss
        - 2.0 * s * wall_stress_term(st, law))
}

/// Right side of the final inequality:
/// `4(2-gamma)(1+t)/(gamma-1) int A rho^gamma + 2c beta/gamma int rho^gamma
///  + 2c(gamma-beta)/gamma |Omega(0)|`.
pub fn inequality_rhs(st: &RadialState, law: &MaterialLaw, t: f64, area0: f64) -> Result<f64> {
    require_blowup_hypotheses(law)?;
    let (g, b, c) = (law.gamma, law.beta, law.c_lam);
    let i_g = rho_gamma_integral(st, law);
    Ok(4.0 * (2.0 - g) * (1.0 + t) / (g - 1.0) * law.a * i_g
        + 2.0 * c * b / g * i_g
        + 2.0 * c * (g - b) / g * area0)
}

/// Derivative of a sampled series by the three-point formula on a possibly
/// non-uniform grid; endpoints are dropped.
pub fn centered_differences(t: &[f64], f: &[f64]) -> Vec<(f64, f64)> {
    (1..t.len().saturating_sub(1))
        .map(|i| {
            let h1 = t[i] - t[i - 1];
            let h2 = t[i + 1] - t[i];
            let d = (h1 * h1 * f[i + 1] - h2 * h2 * f[i - 1] - (h1 * h1 - h2 * h2) * f[i])
                / (h1 * h2 * (h1 + h2));
            (t[i], d)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginSeries {
    pub area0: f64,
    pub mass0: f64,
    /// Every snapshot.
    pub t_all: Vec<f64>,
    pub h: Vec<f64>,
    pub support_area: Vec<f64>,
    /// Interior snapshots where the centered difference exists.
    pub times: Vec<f64>,
    pub dh_diff: Vec<f64>,
    pub dh_formula: Vec<f64>,
    pub rhs: Vec<f64>,
    /// `-2(1+t) W`, already included in `dh_formula`.
    pub wall_term: Vec<f64>,
    pub margin: Vec<f64>,
    pub min_margin: f64,
    /// `max |dh_diff - dh_formula|`: the discretization defect of `H'`.
    pub defect: f64,
}

impl MarginSeries {
    pub fn to_csv(&self) -> crate::format::CsvTable {
        let mut t = crate::format::CsvTable::new(&["t", "H_prime_diff", "H_prime_formula", "wall_term", "rhs", "margin"]);
        for i in 0..self.times.len() {
            t.push(vec![
                self.times[i],
                self.dh_diff[i],
                self.dh_formula[i],
                self.wall_term[i],
                self.rhs[i],
                self.margin[i],
            ]);
        }
        t
    }

    pub fn h_csv(&self) -> crate::format::CsvTable {
        let mut t = crate::format::CsvTable::new(&["t", "H", "support_area"]);
        for i in 0..self.t_all.len() {
            t.push(vec![self.t_all[i], self.h[i], self.support_area[i]]);
        }
        t
    }
}

/// `margin(t) = rhs(t) - H'(t)` along a compactly supported run, with `H'`
/// from centered differences of the snapshot series.
pub fn inequality_margin(run: &RunOutput, law: &MaterialLaw) -> Result<MarginSeries> {
    require_blowup_hypotheses(law)?;
    if !run.scenario.is_compact_support() {
        return Err(Error::Unsupported(
            "the blow-up margin needs compactly supported data (zero far-field density)".into(),
        ));
    }
    let snaps = &run.snapshots;
    if snaps.len() < 3 {
        return Err(Error::Unsupported("need at least three snapshots".into()));
    }
    let area0 = support_area(&snaps[0], 0.0);
    let t_all: Vec<f64> = snaps.iter().map(|s| s.t).collect();
    let h = snaps
        .iter()
        .map(|s| h_functional(s, law, s.t))
        .collect::<Result<Vec<_>>>()?;
    let mut out = MarginSeries {
        area0,
        mass0: snaps[0].mass(),
        support_area: snaps.iter().map(|s| support_area(s, 0.0)).collect(),
        times: Vec::new(),
        dh_diff: Vec::new(),
        dh_formula: Vec::new(),
        rhs: Vec::new(),
        wall_term: Vec::new(),
        margin: Vec::new(),
        min_margin: f64::INFINITY,
        defect: 0.0,
        t_all,
        h,
    };
    for (j, (t, d)) in centered_differences(&out.t_all, &out.h).into_iter().enumerate() {
        let st = &snaps[j + 1];
        let formula = h_derivative_formula(st, law, t)?;
        let rhs = inequality_rhs(st, law, t, area0)?;
        out.times.push(t);
        out.dh_diff.push(d);
        out.dh_formula.push(formula);
        out.rhs.push(rhs);
        out.wall_term.push(-2.0 * (1.0 + t) * wall_stress_term(st, law));
        out.margin.push(rhs - d);
        out.min_margin = out.min_margin.min(rhs - d);
        out.defect = out.defect.max((d - formula).abs());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialGrid;

    fn law() -> MaterialLaw {
        MaterialLaw {
            a: 1.0,
            gamma: 2.0,
            c_lam: 1.0,
            beta: 2.0,
            mu: 1.0,
            ..Default::default()
        }
    }

    #[test]
    fn unit_disk_value() {
        let h = h_functional_profile(
            &law(),
            &DensityProfile::step(1.0, 1.0, 0.0),
            &VelocityProfile::Zero,
            0.0,
            1e-12,
        )
        .unwrap();
        assert!((h - 2.5 * PI).abs() < 1e-10, "{h}");
    }

    #[test]
    fn expanding_field_leaves_only_the_internal_term() {
        let g = RadialGrid::new(2.0, 200).unwrap();
        let t = 0.5;
        let mut st = RadialState::uniform(g, 0.0, 0.0);
        for i in 0..100 {
            st.rho[i] = 1.0;
        }
        for k in 0..=g.n_cells {
            st.v[k] = g.face(k) / (1.0 + t);
        }
        let h = h_functional(&st, &law(), t).unwrap();
        let internal: f64 = (0..100).map(|i| 2.0 * (1.0 + t).powi(2) * g.cell_area(i)).sum();
        assert!((h - internal).abs() < 1e-12 * internal);
    }

    #[test]
    fn vacuum_gives_zero() {
        let st = RadialState::uniform(RadialGrid::new(2.0, 20).unwrap(), 0.0, 0.0);
        assert_eq!(h_functional(&st, &law(), 0.3).unwrap(), 0.0);
        assert_eq!(h_derivative_formula(&st, &law(), 0.3).unwrap(), 0.0);
        let mut l = law();
        l.gamma = 3.0;
        let rhs = inequality_rhs(&st, &l, 0.3, 2.0).unwrap();
        assert!((rhs - 2.0 / 3.0 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn equal_exponents_leave_one_term() {
        let g = RadialGrid::new(2.0, 50).unwrap();
        let st = RadialState::uniform(g, 0.7, 0.0);
        let rhs = inequality_rhs(&st, &law(), 0.4, 123.0).unwrap();
        let expect: f64 = (0..50).map(|i| 2.0 * 0.49 * g.cell_area(i)).sum();
        assert!((rhs - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn gamma_one_is_a_config_error() {
        let l = MaterialLaw { gamma: 1.0, ..law() };
        let st = RadialState::uniform(RadialGrid::new(2.0, 20).unwrap(), 0.0, 0.0);
        assert!(matches!(h_functional(&st, &l, 0.0), Err(Error::Config { .. })));
        let l = MaterialLaw { beta: 2.5, ..law() };
        assert!(matches!(require_blowup_hypotheses(&l), Err(Error::Hypothesis { .. })));
    }

    fn bump_run(law: MaterialLaw, n: usize, h: f64) -> RunOutput {
        let scn = crate::radial::Scenario {
            t_end: 0.1,
            density: DensityProfile::Bump {
                amplitude: 1.0,
                radius: 1.0,
                power: 2.0,
            },
            scheme: "imex".into(),
            ..crate::radial::Scenario::new(law, RadialGrid::new(3.0, n).unwrap())
        };
        let opts = crate::radial::RunOptions {
            snapshot_every: 0,
            snapshot_dt: Some(h),
            ..Default::default()
        };
        crate::radial::run(&scn, &opts).unwrap()
    }

    #[test]
    fn margin_positive_and_defect_shrinks() {
        let l = MaterialLaw {
            gamma: 3.0,
            mu: 0.1,
            ..law()
        };
        let coarse = inequality_margin(&bump_run(l, 128, 0.02), &l).unwrap();
        let fine = inequality_margin(&bump_run(l, 256, 0.01), &l).unwrap();
        assert!(fine.min_margin > 0.0);
        assert!(fine.defect < coarse.defect, "{} {}", coarse.defect, fine.defect);
        assert_eq!(fine.h.len(), fine.t_all.len());
        assert!(fine.h.iter().all(|h| *h > 0.0));
    }

    #[test]
    fn margin_needs_compact_support() {
        let l = law();
        let scn = crate::radial::Scenario {
            t_end: 0.01,
            ..crate::radial::Scenario::new(l, RadialGrid::new(2.0, 16).unwrap())
        };
        let out = crate::radial::run(&scn, &Default::default()).unwrap();
        assert!(matches!(inequality_margin(&out, &l), Err(Error::Unsupported(_))));
    }

    #[test]
    fn centered_difference_is_exact_for_quadratics() {
        let t = [0.0, 0.1, 0.25, 0.3, 0.55];
        let f: Vec<f64> = t.iter().map(|x| 3.0 * x * x - x + 2.0).collect();
        for (x, d) in centered_differences(&t, &f) {
            assert!((d - (6.0 * x - 1.0)).abs() < 1e-12);
        }
    }
}
