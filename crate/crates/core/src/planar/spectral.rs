//! Spectral calculus on the torus `[0, 2pi)^2`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::field::ScalarField;

struct Plans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().unwrap().get(&n) {
        return p.clone();
    }
    let mut w = cache.write().unwrap();
    w.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transpose(buf: &mut [Complex<f64>], n: usize) {
    for j in 0..n {
        for i in (j + 1)..n {
            buf.swap(j * n + i, i * n + j);
        }
    }
}

fn forward(f: &ScalarField) -> Vec<Complex<f64>> {
    let n = f.n();
    let p = plans(n);
    let mut buf: Vec<Complex<f64>> = f.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    p.fwd.process(&mut buf);
    transpose(&mut buf, n);
    p.fwd.process(&mut buf);
    transpose(&mut buf, n);
    buf
}

fn inverse(mut buf: Vec<Complex<f64>>, n: usize) -> ScalarField {
    let p = plans(n);
    p.inv.process(&mut buf);
    transpose(&mut buf, n);
    p.inv.process(&mut buf);
    transpose(&mut buf, n);
    let scale = 1.0 / (n * n) as f64;
    ScalarField::from_values(n, buf.iter().map(|c| c.re * scale).collect())
        .expect("spectral output keeps the grid size")
}

/// Signed integer wavenumber of FFT bin `i`; the Nyquist bin maps to `-n/2`.
fn wavenumber(i: usize, n: usize) -> f64 {
    if i < n / 2 {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

/// Multiplies the spectrum by `m(kx, ky, nyquist_x, nyquist_y)`.
fn apply<M>(f: &ScalarField, m: M) -> ScalarField
where
    M: Fn(f64, f64, bool, bool) -> Complex<f64>,
{
    let n = f.n();
    let mut buf = forward(f);
    for j in 0..n {
        let ky = wavenumber(j, n);
        for i in 0..n {
            let kx = wavenumber(i, n);
            buf[j * n + i] *= m(kx, ky, i == n / 2, j == n / 2);
        }
    }
    inverse(buf, n)
}

/// `d/dx`. The Nyquist mode is dropped so real fields stay real.
pub fn dx(f: &ScalarField) -> ScalarField {
    apply(f, |kx, _, nx, _| if nx { Complex::new(0.0, 0.0) } else { Complex::new(0.0, kx) })
}

/// `d/dy`.
pub fn dy(f: &ScalarField) -> ScalarField {
    apply(f, |_, ky, _, ny| if ny { Complex::new(0.0, 0.0) } else { Complex::new(0.0, ky) })
}

/// Partial derivative along axis 0 (x) or 1 (y).
pub fn partial(f: &ScalarField, axis: usize) -> ScalarField {
    if axis == 0 {
        dx(f)
    } else {
        dy(f)
    }
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    apply(f, |kx, ky, _, _| Complex::new(-(kx * kx + ky * ky), 0.0))
}

/// Zero-mean solution of `Laplace(phi) = g`; the mean of `g` is discarded.
pub fn inverse_laplacian(g: &ScalarField) -> ScalarField {
    apply(g, |kx, ky, _, _| {
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(-1.0 / k2, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        ScalarField::from_fn(n, f).unwrap()
    }

    #[test]
    fn band_limited_derivatives_are_exact() {
        let n = 32;
        let f = sample(n, |x, y| (3.0 * x).sin() * (5.0 * y).cos() + (15.0 * y).sin());
        let fx = sample(n, |x, y| 3.0 * (3.0 * x).cos() * (5.0 * y).cos());
        let fy = sample(n, |x, y| -5.0 * (3.0 * x).sin() * (5.0 * y).sin() + 15.0 * (15.0 * y).cos());
        assert!(dx(&f).max_diff(&fx) < 1e-12);
        assert!(dy(&f).max_diff(&fy) < 1e-12);
        let lap = sample(n, |x, y| {
            -34.0 * (3.0 * x).sin() * (5.0 * y).cos() - 225.0 * (15.0 * y).sin()
        });
        assert!(laplacian(&f).max_diff(&lap) < 1e-10);
    }

    #[test]
    fn constant_has_zero_derivative() {
        let f = sample(16, |_, _| 2.5);
        assert!(dx(&f).max_abs() < 1e-14);
        assert!(dy(&f).max_abs() < 1e-14);
        assert!(laplacian(&f).max_abs() < 1e-14);
    }

    #[test]
    fn poisson_round_trip() {
        let n = 64;
        let phi = sample(n, |x, y| (x + 2.0 * y).cos() + 0.5 * (3.0 * x).sin());
        let back = inverse_laplacian(&laplacian(&phi));
        assert!(back.max_diff(&phi) < 1e-12);
    }

    #[test]
    fn div_of_perp_gradient_vanishes() {
        let n = 32;
        let psi = sample(n, |x, y| x.sin() * (2.0 * y).cos() + (4.0 * x + y).sin());
        // u = (-psi_y, psi_x)
        let ux = dy(&psi).scaled(-1.0);
        let uy = dx(&psi);
        let div = dx(&ux).plus(&dy(&uy));
        assert!(div.max_abs() < 1e-12);
    }
}
