//! A corrupted closed form must be caught by the quadrature comparison.

use viscoflux::error::Result;
use viscoflux::material::{quadrature_consistency, DensityLaw, MaterialLaw};

struct ShiftedG(MaterialLaw, f64);

impl DensityLaw for ShiftedG {
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
        self.0.gamma > 1.0
    }
    fn big_lambda(&self, rho: f64) -> Result<f64> {
        self.0.big_lambda(rho)
    }
    fn potential_g(&self, rho: f64) -> Result<f64> {
        Ok(self.0.potential_g(rho)? * (1.0 + self.1))
    }
    fn potential_gbar(&self, rho: f64) -> Result<f64> {
        self.0.potential_gbar(rho)
    }
}

#[test]
fn exact_closed_forms_pass() {
    let law = MaterialLaw::default();
    let rep = quadrature_consistency(&ShiftedG(law, 0.0), law.rho_bar, 100).unwrap();
    assert!(rep.worst() <= 1e-9, "{rep:?}");
}

#[test]
fn tiny_corruption_of_g_is_detected() {
    let law = MaterialLaw::default();
    for eps in [1e-3, 1e-6, 1e-8] {
        let rep = quadrature_consistency(&ShiftedG(law, eps), law.rho_bar, 100).unwrap();
        assert!(rep.potential_g > 1e-9, "eps {eps}: {rep:?}");
        assert!(rep.big_lambda <= 1e-9);
    }
}
