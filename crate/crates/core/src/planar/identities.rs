//! Pointwise structural identities between `F`, the vorticity matrix and the
//! convective acceleration.

use serde::Serialize;

use super::field::{MatrixField, ScalarField, VectorField};
use super::spectral::{dx, dy, inverse_laplacian, laplacian, partial};
use crate::error::{Error, Result};
use crate::material::MaterialLaw;

/// `w^{j,k} = d_k u^j - d_j u^k`.
pub fn vorticity(u: &VectorField) -> MatrixField {
    MatrixField::from_w12(dy(&u.x).minus(&dx(&u.y)))
}

pub fn divergence(u: &VectorField) -> ScalarField {
    dx(&u.x).plus(&dy(&u.y))
}

pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField {
        x: dx(f),
        y: dy(f),
    }
}

/// `(d_k w^{j,k})_j`.
pub fn div_matrix(w: &MatrixField) -> VectorField {
    VectorField {
        x: dy(w.w12()),
        y: dx(w.w12()).scaled(-1.0),
    }
}

fn check_density(rho: &ScalarField) -> Result<()> {
    let m = rho.min();
    if !(m >= 0.0) {
        return Err(Error::Domain(format!("density must be >= 0, min is {m}")));
    }
    Ok(())
}

/// `F = (lambda(rho) + 2 mu) div u - P(rho) + P(rho_tilde)`.
pub fn effective_flux_field(law: &MaterialLaw, rho: &ScalarField, u: &VectorField) -> Result<ScalarField> {
    check_density(rho)?;
    let pt = law.p_tilde();
    Ok(rho.zip(&divergence(u), |r, d| law.long_visc(r) * d - law.p(r) + pt))
}

/// `u_dot = u_t + (u . grad) u`.
pub fn material_acceleration(u: &VectorField, u_t: &VectorField) -> VectorField {
    let conv = |c: &ScalarField| {
        u.x.times(&dx(c)).plus(&u.y.times(&dy(c)))
    };
    VectorField {
        x: u_t.x.plus(&conv(&u.x)),
        y: u_t.y.plus(&conv(&u.y)),
    }
}

/// Body force used by [`verify_decomposition`].
#[derive(Debug, Clone)]
pub enum Forcing {
    Given(VectorField),
    /// `f = (rho u_dot - grad F - mu div w) / rho`, so the momentum
    /// equation holds by construction. Requires `rho > 0`.
    Manufactured,
}

/// The force that makes `(rho, u, u_t)` an exact solution of the momentum
/// equation.
pub fn manufactured_forcing(
    law: &MaterialLaw,
    rho: &ScalarField,
    u: &VectorField,
    u_t: &VectorField,
) -> Result<VectorField> {
    if !(rho.min() > 0.0) {
        return Err(Error::Unsupported(
            "manufactured forcing needs a strictly positive density".into(),
        ));
    }
    let f_eff = effective_flux_field(law, rho, u)?;
    let grad_f = gradient(&f_eff);
    let dw = div_matrix(&vorticity(u));
    let udot = material_acceleration(u, u_t);
    let comp = |j: usize| {
        rho.times(udot.component(j))
            .minus(grad_f.component(j))
            .minus(&dw.component(j).scaled(law.mu))
            .zip(rho, |a, r| a / r)
    };
    VectorField::new(comp(0), comp(1))
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    /// `|| rho u_dot - grad F - mu div w - rho f ||`.
    pub residual_momentum: f64,
    /// `|| Laplace^{-1} div(rho u_dot - rho f) - (F - mean F) ||`.
    pub residual_poisson: f64,
    /// `|| Laplace u - grad((F + P - P~)/(lambda + 2 mu)) - div w ||`.
    pub residual_elliptic_u: f64,
    /// `int (rho |u|^2 / 2 + G(rho))`.
    pub c0: f64,
    /// `int |grad u|^2`.
    pub grad_u_sq: f64,
    /// `int rho |u_dot|^2`.
    pub rho_udot_sq: f64,
}

pub fn verify_decomposition(
    law: &MaterialLaw,
    rho: &ScalarField,
    u: &VectorField,
    u_t: &VectorField,
    forcing: &Forcing,
) -> Result<DecompositionReport> {
    check_density(rho)?;
    let f = match forcing {
        Forcing::Given(f) => {
            if f.n() != u.n() {
                return Err(Error::config("forcing", "grid size differs from the velocity"));
            }
            f.clone()
        }
        Forcing::Manufactured => manufactured_forcing(law, rho, u, u_t)?,
    };
    let f_eff = effective_flux_field(law, rho, u)?;
    let w = vorticity(u);
    let dw = div_matrix(&w);
    let udot = material_acceleration(u, u_t);
    let grad_f = gradient(&f_eff);

    // rho u_dot - rho f, reused by the Poisson check.
    let inertia = VectorField {
        x: rho.times(&udot.x.minus(&f.x)),
        y: rho.times(&udot.y.minus(&f.y)),
    };
    let momentum = VectorField {
        x: inertia.x.minus(&grad_f.x).minus(&dw.x.scaled(law.mu)),
        y: inertia.y.minus(&grad_f.y).minus(&dw.y.scaled(law.mu)),
    };

    let f_hat = inverse_laplacian(&divergence(&inertia));
    let mean = f_eff.mean();
    let poisson = f_hat.minus(&f_eff.map(|v| v - mean));

    let pt = law.p_tilde();
    let q = f_eff.zip(rho, |fe, r| (fe + law.p(r) - pt) / law.long_visc(r));
    let elliptic = VectorField {
        x: laplacian(&u.x).minus(&partial(&q, 0)).minus(&dw.x),
        y: laplacian(&u.y).minus(&partial(&q, 1)).minus(&dw.y),
    };

    Ok(DecompositionReport {
        residual_momentum: momentum.l2(),
        residual_poisson: poisson.l2(),
        residual_elliptic_u: elliptic.l2(),
        c0: initial_energy(law, rho, u)?,
        grad_u_sq: grad_sq(u).integral(),
        rho_udot_sq: rho.times(&udot.norm_sq()).integral(),
    })
}

/// `int (rho |u|^2 / 2 + G(rho)) dx`.
pub fn initial_energy(law: &MaterialLaw, rho: &ScalarField, u: &VectorField) -> Result<f64> {
    check_density(rho)?;
    let mut g = Vec::with_capacity(rho.values().len());
    for &r in rho.values() {
        g.push(law.potential_g(r)?);
    }
    let g = ScalarField::from_values(rho.n(), g)?;
    Ok(rho.times(&u.norm_sq()).scaled(0.5).plus(&g).integral())
}

/// Pointwise `|grad u|^2 = sum_{j,k} (d_k u^j)^2`.
fn grad_sq(u: &VectorField) -> ScalarField {
    let mut acc = ScalarField::constant(u.n(), 0.0).expect("valid grid");
    for j in 0..2 {
        for k in 0..2 {
            let d = partial(u.component(j), k);
            acc = acc.plus(&d.times(&d));
        }
    }
    acc
}

/// One time level of a planar history.
#[derive(Debug, Clone)]
pub struct FieldFrame {
    pub t: f64,
    pub rho: ScalarField,
    pub u: VectorField,
    pub u_t: VectorField,
}

/// Time series of the weighted `A1`/`A2` quantities with `sigma = min(1, t)`.
/// Time integrals use the trapezoid rule over the frame times.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FunctionalRecord {
    pub c0: f64,
    pub times: Vec<f64>,
    /// Running `sup sigma int |grad u|^2`.
    pub sup_sigma_grad_u: Vec<f64>,
    /// Running `int_0^t sigma int rho |u_dot|^2`.
    pub int_sigma_rho_udot: Vec<f64>,
    /// Running `sup sigma^2 int rho |u_dot|^2`.
    pub sup_sigma2_rho_udot: Vec<f64>,
    /// Running `int_0^t sigma^2 int |grad u_dot|^2`.
    pub int_sigma2_grad_udot: Vec<f64>,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
}

pub fn data_functionals(law: &MaterialLaw, history: &[FieldFrame]) -> Result<FunctionalRecord> {
    let Some(first) = history.first() else {
        return Ok(FunctionalRecord::default());
    };
    if history.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::config("history", "frame times must be strictly increasing"));
    }
    let mut rec = FunctionalRecord {
        c0: initial_energy(law, &first.rho, &first.u)?,
        ..Default::default()
    };

    let mut prev: Option<(f64, f64, f64)> = None;
    let (mut s1, mut i1, mut s2, mut i2) = (0.0f64, 0.0, 0.0f64, 0.0);
    for fr in history {
        check_density(&fr.rho)?;
        let sigma = fr.t.clamp(0.0, 1.0);
        let udot = material_acceleration(&fr.u, &fr.u_t);
        let grad_u = grad_sq(&fr.u).integral();
        let rho_udot = fr.rho.times(&udot.norm_sq()).integral();
        let grad_udot = grad_sq(&udot).integral();

        let a = sigma * rho_udot;
        let b = sigma * sigma * grad_udot;
        if let Some((tp, ap, bp)) = prev {
            let h = fr.t - tp;
            i1 += 0.5 * h * (a + ap);
            i2 += 0.5 * h * (b + bp);
        }
        prev = Some((fr.t, a, b));
        s1 = s1.max(sigma * grad_u);
        s2 = s2.max(sigma * sigma * rho_udot);

        rec.times.push(fr.t);
        rec.sup_sigma_grad_u.push(s1);
        rec.int_sigma_rho_udot.push(i1);
        rec.sup_sigma2_rho_udot.push(s2);
        rec.int_sigma2_grad_udot.push(i2);
        rec.a1.push(s1 + i1);
        rec.a2.push(s2 + i2);
    }
    Ok(rec)
}
