//! Upper bound on the lifespan of smooth compactly supported solutions.
//!
//! The functional bound gives `int A rho^gamma dx <= G(t)` with `G -> 0`,
//! while mass conservation and Hoelder force
//! `M0 <= (G(t)/A)^(1/gamma) |Omega(0)|^((gamma-1)/gamma)`.
//! The first time this fails is `T*`.

use serde::{Deserialize, Serialize};

use super::functional::require_blowup_hypotheses;
use crate::error::{Error, Result};
use crate::material::MaterialLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxBranch {
    /// `(1+t)/(2 gamma - 3) (1 - (1+t)^(3 - 2 gamma))`.
    Power,
    /// `(1+t)^(4 - 2 gamma) ln(1+t)`, at `2 gamma = 3`.
    Log,
}

pub fn aux_branch(gamma: f64) -> AuxBranch {
    if (2.0 * gamma - 3.0).abs() < 1e-12 {
        AuxBranch::Log
    } else {
        AuxBranch::Power
    }
}

/// The auxiliary growth function multiplying the support-area term.
pub fn aux_f(gamma: f64, t: f64) -> f64 {
    let l = t.ln_1p();
    match aux_branch(gamma) {
        AuxBranch::Log => ((4.0 - 2.0 * gamma) * l).exp() * l,
        AuxBranch::Power => {
            let k = 2.0 * gamma - 3.0;
            // 1 - (1+t)^(-k) = -expm1(-k l), stable near k = 0.
            -(1.0 + t) * (-k * l).exp_m1() / k
        }
    }
}

/// Data of the lifespan bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifespanInput {
    pub h0: f64,
    pub mass0: f64,
    pub area0: f64,
}

impl LifespanInput {
    pub fn validate(&self) -> Result<()> {
        for (k, v) in [("H0", self.h0), ("M0", self.mass0), ("area0", self.area0)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(k, "must be finite and > 0"));
            }
        }
        Ok(())
    }
}

/// `G(t) = (gamma-1)/2 (1+t)^(2-2gamma) H0
///  + c(gamma-1)(gamma-beta)/gamma |Omega(0)| e^(2c beta(gamma-1)/(A gamma)) F(t) (1+t)^-2`.
pub fn g_bound(law: &MaterialLaw, inp: &LifespanInput, t: f64) -> f64 {
    let (g, b, c, a) = (law.gamma, law.beta, law.c_lam, law.a);
    let s = 1.0 + t;
    let first = 0.5 * (g - 1.0) * s.powf(2.0 - 2.0 * g) * inp.h0;
    if g == b {
        return first;
    }
    let e = (2.0 * c * b * (g - 1.0) / (a * g)).exp();
    first + c * (g - 1.0) * (g - b) / g * inp.area0 * e * aux_f(g, t) / (s * s)
}

/// `ln` of the Hoelder upper bound on the mass minus `ln M0`; negative once
/// the bound contradicts conservation.
fn mass_gap(law: &MaterialLaw, inp: &LifespanInput, t: f64) -> f64 {
    let g = law.gamma;
    (g_bound(law, inp, t) / law.a).ln() / g + (g - 1.0) / g * inp.area0.ln() - inp.mass0.ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct Lifespan {
    pub input: LifespanInput,
    pub branch: AuxBranch,
    /// `None` when no contradiction is reachable on the scanned horizon.
    pub t_star: Option<f64>,
    pub note: String,
    pub curve_t: Vec<f64>,
    pub curve_g: Vec<f64>,
}

/// Log-spaced scan in `ln(1+t)` up to this value, then bisection.
const LOG_HORIZON: f64 = 40.0;
const SCAN_POINTS: usize = 8000;
const CURVE_POINTS: usize = 201;

/// Smallest `t >= 0` at which the mass inequality fails.
pub fn contradiction_time(law: &MaterialLaw, inp: &LifespanInput) -> Result<Lifespan> {
    require_blowup_hypotheses(law)?;
    inp.validate()?;
    let gap = |t: f64| mass_gap(law, inp, t);

    let mut t_star = None;
    if gap(0.0) < 0.0 {
        t_star = Some(0.0);
    } else {
        let mut lo = 0.0;
        for j in 1..=SCAN_POINTS {
            let hi = (LOG_HORIZON * j as f64 / SCAN_POINTS as f64).exp_m1();
            if gap(hi) < 0.0 {
                t_star = Some(bisect(&gap, lo, hi));
                break;
            }
            lo = hi;
        }
    }

    let note = match t_star {
        Some(_) => "mass inequality fails".to_string(),
        None => format!(
            "no contradiction reachable for t <= {:.3e}",
            LOG_HORIZON.exp_m1()
        ),
    };
    let t_max = t_star.map_or(10.0, |t| (2.0 * t).max(1.0));
    let curve_t: Vec<f64> = (0..CURVE_POINTS)
        .map(|j| t_max * j as f64 / (CURVE_POINTS - 1) as f64)
        .collect();
    let curve_g = curve_t.iter().map(|t| g_bound(law, inp, *t)).collect();
    Ok(Lifespan {
        input: *inp,
        branch: aux_branch(law.gamma),
        t_star,
        note,
        curve_t,
        curve_g,
    })
}

/// Bisection on `f(lo) >= 0 > f(hi)` down to adjacent floats.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if f(mid) < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParam {
    H0,
    Area0,
    Mass0,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityScan {
    pub param: ScanParam,
    pub values: Vec<f64>,
    pub t_star: Vec<Option<f64>>,
    /// Increasing in `H0` and `area0`, decreasing in `M0`.
    pub expected_increasing: bool,
    pub monotone: bool,
}

/// Evaluates `T*` at each value of one parameter with the others fixed and
/// checks the expected strict monotonicity.
pub fn monotonicity_scan(
    law: &MaterialLaw,
    base: &LifespanInput,
    param: ScanParam,
    values: &[f64],
) -> Result<MonotonicityScan> {
    let mut t_star = Vec::with_capacity(values.len());
    for v in values {
        let mut inp = *base;
        match param {
            ScanParam::H0 => inp.h0 = *v,
            ScanParam::Area0 => inp.area0 = *v,
            ScanParam::Mass0 => inp.mass0 = *v,
        }
        t_star.push(contradiction_time(law, &inp)?.t_star);
    }
    let expected_increasing = param != ScanParam::Mass0;
    let sign = if expected_increasing { 1.0 } else { -1.0 };
    let monotone = (1..values.len()).all(|j| match (t_star[j - 1], t_star[j]) {
        (Some(a), Some(b)) => (b - a) * (values[j] - values[j - 1]) * sign > 0.0,
        _ => false,
    });
    Ok(MonotonicityScan {
        param,
        values: values.to_vec(),
        t_star,
        expected_increasing,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn law(gamma: f64, beta: f64) -> MaterialLaw {
        MaterialLaw {
            a: 1.0,
            gamma,
            c_lam: 1.0,
            beta,
            mu: 1.0,
            ..Default::default()
        }
    }

    fn disk(h0: f64) -> LifespanInput {
        LifespanInput {
            h0,
            mass0: PI,
            area0: PI,
        }
    }

    #[test]
    fn unit_disk_closed_form() {
        let l = contradiction_time(&law(2.0, 2.0), &disk(2.5 * PI)).unwrap();
        let t = l.t_star.unwrap();
        assert!((t - (5f64.sqrt() / 2.0 - 1.0)).abs() < 1e-12, "{t}");
        assert_eq!(l.branch, AuxBranch::Power);
    }

    #[test]
    fn quadrupled_h0_scales_the_lifespan() {
        let t = contradiction_time(&law(2.0, 2.0), &disk(10.0 * PI)).unwrap().t_star.unwrap();
        assert!((t - (5f64.sqrt() - 1.0)).abs() < 1e-12, "{t}");
    }

    #[test]
    fn log_branch_at_three_halves() {
        assert_eq!(aux_branch(1.5), AuxBranch::Log);
        let t: f64 = 0.7;
        assert_eq!(aux_f(1.5, t), t.ln_1p() * (1.0 + t));
        // The power branch tends to the log branch as 2 gamma -> 3.
        assert!((aux_f(1.5 + 1e-9, t) - aux_f(1.5, t)).abs() < 1e-7);
        let l = contradiction_time(&law(1.5, 1.2), &disk(2.5 * PI)).unwrap();
        assert_eq!(l.branch, AuxBranch::Log);
        assert!(l.t_star.is_some());
    }

    #[test]
    fn power_branch_matches_the_integral() {
        // F(t) = (1+t)^(4-2g) int_0^t (1+s)^(2g-4) ds.
        for g in [1.2, 2.0, 2.7] {
            let t = 1.3;
            let integral = crate::quadrature::integrate(|s: f64| (1.0 + s).powf(2.0 * g - 4.0), 0.0, t);
            let expect = (1.0f64 + t).powf(4.0 - 2.0 * g) * integral;
            assert!((aux_f(g, t) - expect).abs() < 1e-9, "{g}");
        }
    }

    #[test]
    fn already_violated_at_zero() {
        let inp = LifespanInput {
            h0: 1e-6,
            mass0: PI,
            area0: PI,
        };
        assert_eq!(contradiction_time(&law(2.0, 2.0), &inp).unwrap().t_star, Some(0.0));
    }

    #[test]
    fn hypotheses_enforced() {
        assert!(matches!(
            contradiction_time(&law(2.0, 1.0), &disk(1.0)),
            Err(Error::Hypothesis { .. })
        ));
        assert!(matches!(
            contradiction_time(&law(1.0, 1.0), &disk(1.0)),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn scans_are_monotone() {
        let l = law(2.5, 1.8);
        let base = disk(2.5 * PI);
        let grid: Vec<f64> = (0..10).map(|j| 1.0 + 0.4 * j as f64).collect();
        for (p, scale) in [(ScanParam::H0, 2.5 * PI), (ScanParam::Area0, PI), (ScanParam::Mass0, PI)] {
            let vals: Vec<f64> = grid
                .iter()
                .map(|g| if p == ScanParam::Mass0 { scale / g } else { g * scale })
                .collect();
            let s = monotonicity_scan(&l, &base, p, &vals).unwrap();
            assert!(s.monotone, "{p:?}: {:?}", s.t_star);
        }
    }

    proptest! {
        #[test]
        fn g_rises_at_most_once_then_decays(
            gamma in 1.55f64..4.0,
            frac in 0.0f64..1.0,
            h0 in 0.1f64..100.0,
        ) {
            let beta = 1.0 + 1e-3 + frac * (gamma - 1.0 - 1e-3);
            let l = law(gamma, beta);
            let inp = LifespanInput { h0, mass0: 1.0, area0: 1.0 };
            let ts: Vec<f64> = (0..300).map(|j| (j as f64 * 0.1).exp_m1()).collect();
            let g: Vec<f64> = ts.iter().map(|t| g_bound(&l, &inp, *t)).collect();
            let peak = (0..g.len()).max_by(|a, b| g[*a].partial_cmp(&g[*b]).unwrap()).unwrap();
            for w in g[..=peak].windows(2) {
                prop_assert!(w[1] >= w[0]);
            }
            for w in g[peak..].windows(2) {
                prop_assert!(w[1] < w[0]);
            }
            prop_assert!(g[299] < 1e-6 * g[peak]);
        }

        #[test]
        fn g_strictly_decreases_for_equal_exponents(gamma in 1.05f64..4.0, h0 in 0.1f64..100.0) {
            let l = law(gamma, gamma);
            let inp = LifespanInput { h0, mass0: 1.0, area0: 1.0 };
            let g: Vec<f64> = (0..200).map(|j| g_bound(&l, &inp, (j as f64 * 0.1).exp_m1())).collect();
            for w in g.windows(2) {
                prop_assert!(w[1] < w[0]);
            }
        }
    }
}
