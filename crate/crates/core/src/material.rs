//! Constitutive laws: pressure, bulk viscosity and the scalar functions of
//! density derived from them.
//!
//! The primary law is the power-law pair `P = A rho^gamma`,
//! `lambda = c rho^beta` (with `beta = 0` giving the constant-lambda mode).
//! Any other law can be plugged in through [`DensityLaw`], whose derived
//! quantities fall back to adaptive quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, DEFAULT_TOL};

/// Scalar functions of density shared by every law.
///
/// Implementors supply the pressure, the bulk viscosity and the constants;
/// `big_lambda`, `potential_g` and `potential_gbar` default to quadrature and
/// may be overridden by closed forms. The `*_quadrature` methods are never
/// overridden and serve as the independent route.
pub trait DensityLaw {
    fn pressure_raw(&self, rho: f64) -> f64;
    fn lambda_raw(&self, rho: f64) -> f64;
    fn mu(&self) -> f64;
    fn rho_tilde(&self) -> f64;
    /// True when `int_0^1 P(s)/s^2 ds` is finite, so that `Gbar` exists.
    fn gbar_defined(&self) -> bool;

    fn big_lambda(&self, rho: f64) -> Result<f64> {
        self.big_lambda_quadrature(rho)
    }

    fn potential_g(&self, rho: f64) -> Result<f64> {
        self.potential_g_quadrature(rho)
    }

    fn potential_gbar(&self, rho: f64) -> Result<f64> {
        self.potential_gbar_quadrature(rho)
    }

    fn big_lambda_quadrature(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::Domain(format!(
                "Lambda(rho) requires rho > 0, got {rho}"
            )));
        }
        let mu = self.mu();
        let e = adaptive_simpson(
            |s| (2.0 * mu + self.lambda_raw(s)) / s,
            self.rho_tilde(),
            rho,
            DEFAULT_TOL * 1e-3,
        );
        Ok(e.value)
    }

    fn potential_g_quadrature(&self, rho: f64) -> Result<f64> {
        check_nonnegative(rho)?;
        if rho == 0.0 {
            // rho * int_{rho}^{rho_tilde} P(rho_tilde)/s^2 ds -> P(rho_tilde) as rho -> 0+.
            return Ok(self.pressure_raw(self.rho_tilde()));
        }
        let rt = self.rho_tilde();
        let pt = self.pressure_raw(rt);
        let e = adaptive_simpson(
            |s| (self.pressure_raw(s) - pt) / (s * s),
            rt,
            rho,
            DEFAULT_TOL * 1e-3,
        );
        Ok(rho * e.value)
    }

    fn potential_gbar_quadrature(&self, rho: f64) -> Result<f64> {
        check_nonnegative(rho)?;
        if !self.gbar_defined() {
            return Err(gbar_hypothesis());
        }
        if rho == 0.0 {
            return Ok(0.0);
        }
        // The integrand P(s)/s^2 may be singular but integrable at 0; the
        // substitution s = rho * w^2 removes square-root type singularities.
        let e = adaptive_simpson(
            |w: f64| {
                if w == 0.0 {
                    0.0
                } else {
                    let s = rho * w * w;
                    self.pressure_raw(s) / (s * s) * 2.0 * rho * w
                }
            },
            0.0,
            1.0,
            DEFAULT_TOL * 1e-3,
        );
        Ok(rho * e.value)
    }
}

fn check_nonnegative(rho: f64) -> Result<()> {
    if rho >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("density must be >= 0, got {rho}")))
    }
}

fn gbar_hypothesis() -> Error {
    Error::Hypothesis {
        hypothesis: "two-fluid energy identity: int_0^1 s^-2 P(s) ds < inf",
        message: "Gbar(rho) requires gamma > 1".into(),
    }
}

/// Power-law barotropic material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialLaw {
    /// Pressure coefficient.
    #[serde(rename = "A")]
    pub a: f64,
    pub gamma: f64,
    pub c_lam: f64,
    pub beta: f64,
    pub mu: f64,
    pub rho_tilde: f64,
    pub rho_bar: f64,
    /// Integrability exponent; recorded, never used in computation.
    pub q: f64,
}

impl Default for MaterialLaw {
    fn default() -> Self {
        MaterialLaw {
            a: 1.0,
            gamma: 2.0,
            c_lam: 1.0,
            beta: 2.0,
            mu: 1.0,
            rho_tilde: 1.0,
            rho_bar: 3.0,
            q: 1.0,
        }
    }
}

impl MaterialLaw {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("A", self.a),
            ("gamma", self.gamma),
            ("c_lam", self.c_lam),
            ("beta", self.beta),
            ("mu", self.mu),
            ("rho_tilde", self.rho_tilde),
            ("rho_bar", self.rho_bar),
            ("q", self.q),
        ];
        for (k, v) in finite {
            if !v.is_finite() {
                return Err(Error::config(format!("law.{k}"), "must be finite"));
            }
        }
        if !(self.a > 0.0) {
            return Err(Error::config("law.A", "pressure coefficient must be > 0"));
        }
        if !(self.gamma >= 1.0) {
            return Err(Error::config("law.gamma", "adiabatic exponent must be >= 1"));
        }
        if !(self.c_lam >= 0.0) {
            return Err(Error::config("law.c_lam", "lambda(rho) must be >= 0"));
        }
        if !(self.beta >= 0.0) {
            return Err(Error::config("law.beta", "exponent must be >= 0"));
        }
        if !(self.mu > 0.0) {
            return Err(Error::config("law.mu", "shear viscosity must be > 0"));
        }
        if !(self.rho_tilde > 0.0) {
            return Err(Error::config("law.rho_tilde", "must be > 0"));
        }
        if !(self.rho_bar > self.rho_tilde) {
            return Err(Error::config("law.rho_bar", "must exceed rho_tilde"));
        }
        if !(self.q > 0.0 && self.q < 2.0) {
            return Err(Error::config("law.q", "must lie in (0, 2)"));
        }
        Ok(())
    }

    /// `P(rho) = A rho^gamma`.
    pub fn pressure(&self, rho: f64) -> Result<f64> {
        check_nonnegative(rho)?;
        Ok(self.p(rho))
    }

    /// `lambda(rho) = c rho^beta`.
    pub fn lambda_visc(&self, rho: f64) -> Result<f64> {
        check_nonnegative(rho)?;
        Ok(self.lam(rho))
    }

    /// Unchecked pressure for inner loops; negative input is treated as 0.
    #[inline]
    pub fn p(&self, rho: f64) -> f64 {
        self.a * powf_nonneg(rho, self.gamma)
    }

    #[inline]
    pub fn dp(&self, rho: f64) -> f64 {
        if self.gamma == 1.0 {
            self.a
        } else {
            self.a * self.gamma * powf_nonneg(rho, self.gamma - 1.0)
        }
    }

    #[inline]
    pub fn lam(&self, rho: f64) -> f64 {
        if self.beta == 0.0 {
            self.c_lam
        } else {
            self.c_lam * powf_nonneg(rho, self.beta)
        }
    }

    /// Total longitudinal viscosity `lambda(rho) + 2 mu`.
    #[inline]
    pub fn long_visc(&self, rho: f64) -> f64 {
        self.lam(rho) + 2.0 * self.mu
    }

    /// Sound speed `sqrt(P'(rho))`.
    #[inline]
    pub fn sound_speed(&self, rho: f64) -> f64 {
        self.dp(rho).sqrt()
    }

    pub fn p_tilde(&self) -> f64 {
        self.p(self.rho_tilde)
    }

    /// `Lambda(rho) = int_{rho_tilde}^{rho} (2 mu + lambda(s)) / s ds`.
    pub fn big_lambda(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(Error::Domain(format!(
                "Lambda(rho) diverges at vacuum; need rho > 0, got {rho}"
            )));
        }
        let rt = self.rho_tilde;
        let log = (rho / rt).ln();
        Ok(if self.beta == 0.0 {
            (2.0 * self.mu + self.c_lam) * log
        } else {
            2.0 * self.mu * log + self.c_lam / self.beta * (rho.powf(self.beta) - rt.powf(self.beta))
        })
    }

    /// `G(rho) = rho int_{rho_tilde}^{rho} (P(s) - P(rho_tilde)) / s^2 ds`.
    pub fn potential_g(&self, rho: f64) -> Result<f64> {
        check_nonnegative(rho)?;
        let rt = self.rho_tilde;
        let pt = self.p_tilde();
        if rho == 0.0 {
            return Ok(pt);
        }
        if rho == rt {
            return Ok(0.0);
        }
        let g = if self.gamma == 1.0 {
            self.a * (rho * (rho / rt).ln() - rho + rt)
        } else {
            let g1 = self.gamma - 1.0;
            self.a * (rho.powf(self.gamma) - rho * rt.powf(g1)) / g1 - pt * rho / rt + pt
        };
        // Cancellation near rho_tilde can leave a tiny negative residue.
        Ok(g.max(0.0))
    }

    /// `Gbar(rho) = rho int_0^rho P(s)/s^2 ds = A rho^gamma / (gamma - 1)`.
    pub fn potential_gbar(&self, rho: f64) -> Result<f64> {
        check_nonnegative(rho)?;
        if !(self.gamma > 1.0) {
            return Err(gbar_hypothesis());
        }
        Ok(self.p(rho) / (self.gamma - 1.0))
    }

    /// `F = (lambda + 2 mu) div u - P(rho) + P(rho_tilde)`.
    pub fn effective_flux_scalar(&self, rho: f64, divu: f64) -> Result<f64> {
        check_nonnegative(rho)?;
        Ok(self.long_visc(rho) * divu - self.p(rho) + self.p_tilde())
    }

    /// Returns `(nu, P0)` with `nu = 1/(2 mu + lambda)` and
    /// `P0 = nu (P - P(rho_tilde))`.
    pub fn nu_and_p0(&self, rho: f64) -> Result<(f64, f64)> {
        check_nonnegative(rho)?;
        let nu = 1.0 / self.long_visc(rho);
        Ok((nu, nu * (self.p(rho) - self.p_tilde())))
    }
}

#[inline]
fn powf_nonneg(x: f64, e: f64) -> f64 {
    if x <= 0.0 {
        if e == 0.0 {
            1.0
        } else {
            0.0
        }
    } else if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else {
        x.powf(e)
    }
}

impl DensityLaw for MaterialLaw {
    fn pressure_raw(&self, rho: f64) -> f64 {
        self.p(rho)
    }
    fn lambda_raw(&self, rho: f64) -> f64 {
        self.lam(rho)
    }
    fn mu(&self) -> f64 {
        self.mu
    }
    fn rho_tilde(&self) -> f64 {
        self.rho_tilde
    }
    fn gbar_defined(&self) -> bool {
        self.gamma > 1.0
    }
    fn big_lambda(&self, rho: f64) -> Result<f64> {
        MaterialLaw::big_lambda(self, rho)
    }
    fn potential_g(&self, rho: f64) -> Result<f64> {
        MaterialLaw::potential_g(self, rho)
    }
    fn potential_gbar(&self, rho: f64) -> Result<f64> {
        MaterialLaw::potential_gbar(self, rho)
    }
}

/// Worst relative disagreement between closed-form and quadrature routes for
/// `Lambda`, `G` and `Gbar` over `n` densities evenly spaced in `(0, rho_bar]`.
///
/// Values below `1e-12` in magnitude are compared in absolute terms, since
/// `Lambda` and `G` vanish at `rho_tilde`.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct ConsistencyReport {
    pub big_lambda: f64,
    pub potential_g: f64,
    pub potential_gbar: f64,
}

impl ConsistencyReport {
    pub fn worst(&self) -> f64 {
        self.big_lambda.max(self.potential_g).max(self.potential_gbar)
    }
}

pub fn quadrature_consistency<L: DensityLaw + ?Sized>(
    law: &L,
    rho_bar: f64,
    n: usize,
) -> Result<ConsistencyReport> {
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-12);
    let mut rep = ConsistencyReport::default();
    for k in 1..=n {
        let rho = rho_bar * k as f64 / n as f64;
        rep.big_lambda = rep
            .big_lambda
            .max(rel(law.big_lambda(rho)?, law.big_lambda_quadrature(rho)?));
        rep.potential_g = rep
            .potential_g
            .max(rel(law.potential_g(rho)?, law.potential_g_quadrature(rho)?));
        if law.gbar_defined() {
            rep.potential_gbar = rep.potential_gbar.max(rel(
                law.potential_gbar(rho)?,
                law.potential_gbar_quadrature(rho)?,
            ));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn law() -> MaterialLaw {
        MaterialLaw::default()
    }

    #[test]
    fn pressure_values() {
        let l = law();
        assert_eq!(l.pressure(0.0).unwrap(), 0.0);
        assert_eq!(l.pressure(l.rho_tilde).unwrap(), l.rho_tilde * l.rho_tilde);
        assert_eq!(l.pressure(2.0).unwrap(), 4.0);
        assert!(matches!(l.pressure(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn lambda_values() {
        let l = law();
        assert_eq!(l.lambda_visc(0.0).unwrap(), 0.0);
        assert_eq!(l.lambda_visc(2.0).unwrap(), 4.0);
        let c0 = MaterialLaw { c_lam: 0.0, ..law() };
        assert_eq!(c0.lambda_visc(1.7).unwrap(), 0.0);
        assert!(l.lambda_visc(-0.1).is_err());
    }

    #[test]
    fn big_lambda_values() {
        let l = law();
        assert_eq!(l.big_lambda(l.rho_tilde).unwrap(), 0.0);
        let c0 = MaterialLaw { c_lam: 0.0, ..law() };
        assert_relative_eq!(c0.big_lambda(std::f64::consts::E).unwrap(), 2.0, max_relative = 1e-14);
        // Quadrature oracle: int_1^2 (2 + s^2)/s ds.
        let oracle = crate::quadrature::integrate(|s| (2.0 + s * s) / s, 1.0, 2.0);
        let v = l.big_lambda(2.0).unwrap();
        assert_relative_eq!(v, oracle, max_relative = 1e-10);
        assert_relative_eq!(v, 2.0 * 2f64.ln() + 1.5, max_relative = 1e-15);
        assert!(l.big_lambda(0.0).is_err());
        assert!(l.big_lambda(-1.0).is_err());
    }

    #[test]
    fn potential_g_values() {
        let l = law();
        assert_eq!(l.potential_g(1.0).unwrap(), 0.0);
        // Oracle: rho * int_1^rho (s^2 - 1)/s^2 ds by quadrature.
        for (rho, expect) in [(2.0, 1.0), (0.5, 0.25)] {
            let oracle = rho * crate::quadrature::integrate(|s| (s * s - 1.0) / (s * s), 1.0, rho);
            assert_relative_eq!(oracle, expect, max_relative = 1e-10);
            assert_relative_eq!(l.potential_g(rho).unwrap(), expect, max_relative = 1e-14);
        }
        assert_eq!(l.potential_g(0.0).unwrap(), 1.0);
    }

    #[test]
    fn potential_g_isothermal() {
        let l = MaterialLaw { gamma: 1.0, ..law() };
        for rho in [0.1, 0.7, 1.0, 2.5] {
            let q = l.potential_g_quadrature(rho).unwrap();
            assert!((l.potential_g(rho).unwrap() - q).abs() < 1e-10);
        }
    }

    #[test]
    fn potential_gbar_values() {
        let l = law();
        assert_eq!(l.potential_gbar(0.0).unwrap(), 0.0);
        assert_relative_eq!(l.potential_gbar(2.0).unwrap(), 4.0);
        let l3 = MaterialLaw { gamma: 3.0, ..law() };
        let oracle = crate::quadrature::integrate(|s| s, 0.0, 1.0);
        assert_relative_eq!(oracle, 0.5, max_relative = 1e-12);
        assert_relative_eq!(l3.potential_gbar(1.0).unwrap(), 0.5);
        let l1 = MaterialLaw { gamma: 1.0, ..law() };
        assert!(matches!(l1.potential_gbar(1.0), Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn effective_flux_values() {
        let l = law();
        assert_eq!(l.effective_flux_scalar(l.rho_tilde, 0.0).unwrap(), 0.0);
        assert_eq!(l.effective_flux_scalar(2.0, 0.5).unwrap(), 0.0);
        let d = 0.37;
        assert_eq!(
            l.effective_flux_scalar(0.0, d).unwrap(),
            2.0 * l.mu * d + l.p_tilde()
        );
    }

    #[test]
    fn nu_p0_values() {
        let l = law();
        let (nu, p0) = l.nu_and_p0(l.rho_tilde).unwrap();
        assert_eq!(nu, 1.0 / (2.0 * l.mu + l.lam(l.rho_tilde)));
        assert_eq!(p0, 0.0);
        let c0 = MaterialLaw { c_lam: 0.0, ..law() };
        assert_eq!(c0.nu_and_p0(2.3).unwrap().0, 0.5);
        let (nu, p0) = l.nu_and_p0(2.0).unwrap();
        assert_relative_eq!(nu, 1.0 / 6.0);
        assert_relative_eq!(p0, 0.5);
    }

    #[test]
    fn validation_rejects_bad_laws() {
        assert!(law().validate().is_ok());
        let bad = MaterialLaw { mu: 0.0, ..law() };
        assert!(matches!(bad.validate(), Err(Error::Config { key, .. }) if key == "law.mu"));
        let bad = MaterialLaw { rho_bar: 0.5, ..law() };
        assert!(bad.validate().is_err());
        let bad = MaterialLaw { q: 2.0, ..law() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for l in [
            law(),
            MaterialLaw { gamma: 1.4, beta: 3.0, c_lam: 0.3, ..law() },
            MaterialLaw { beta: 0.0, c_lam: 0.5, gamma: 1.0, ..law() },
            MaterialLaw { gamma: 3.0, beta: 2.5, rho_tilde: 0.7, rho_bar: 2.0, ..law() },
        ] {
            let rep = quadrature_consistency(&l, l.rho_bar, 100).unwrap();
            assert!(rep.worst() <= 1e-9, "{rep:?} for {l:?}");
        }
    }

    #[test]
    fn domination_of_quadratic_by_g() {
        let l = MaterialLaw { gamma: 1.4, ..law() };
        let mut worst = 0.0f64;
        for k in 0..=20_000 {
            let rho = l.rho_bar * k as f64 / 20_000.0;
            if (rho - l.rho_tilde).abs() < 1e-9 {
                continue;
            }
            let g = l.potential_g(rho).unwrap();
            worst = worst.max((rho - l.rho_tilde).powi(2) / g);
        }
        // Near rho_tilde the ratio tends to 2 rho_tilde / P'(rho_tilde).
        let limit = 2.0 * l.rho_tilde / l.dp(l.rho_tilde);
        assert!(worst.is_finite() && worst < 4.0 * limit, "{worst}");
    }

    struct CorruptedLambda(MaterialLaw);

    impl DensityLaw for CorruptedLambda {
        fn pressure_raw(&self, rho: f64) -> f64 {
            self.0.p(rho)
        }
        fn lambda_raw(&self, rho: f64) -> f64 {
            self.0.lam(rho)
        }
        fn mu(&self) -> f64 {
            self.0.mu
        }
        fn rho_tilde(&self) -> f64 {
            self.0.rho_tilde
        }
        fn gbar_defined(&self) -> bool {
            true
        }
        fn big_lambda(&self, rho: f64) -> Result<f64> {
            Ok(self.0.big_lambda(rho)? * (1.0 + 1e-6))
        }
        fn potential_g(&self, rho: f64) -> Result<f64> {
            self.0.potential_g(rho)
        }
        fn potential_gbar(&self, rho: f64) -> Result<f64> {
            self.0.potential_gbar(rho)
        }
    }

    #[test]
    fn corrupted_closed_form_is_detected() {
        let rep = quadrature_consistency(&CorruptedLambda(law()), 3.0, 100).unwrap();
        assert!(rep.big_lambda > 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn lambda_and_pressure_monotone(
            r1 in 1e-3f64..3.0, r2 in 1e-3f64..3.0,
            gamma in 1.0f64..3.0, beta in 0.0f64..4.0, c in 0.0f64..2.0,
        ) {
            let l = MaterialLaw { gamma, beta, c_lam: c, ..law() };
            let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            proptest::prop_assume!(hi - lo > 1e-9);
            proptest::prop_assert!(l.big_lambda(lo).unwrap() < l.big_lambda(hi).unwrap());
            proptest::prop_assert!(l.pressure(lo).unwrap() <= l.pressure(hi).unwrap());
            proptest::prop_assert!(l.potential_g(lo).unwrap() >= 0.0);
        }
    }
}
