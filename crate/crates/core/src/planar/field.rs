//! Grid fields on the torus `[0, 2pi)^2`.
//!
//! Node `(i, j)` sits at `x = 2 pi i / n`, `y = 2 pi j / n` and is stored at
//! index `j * n + i`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    n: usize,
    values: Vec<f64>,
}

fn check_n(n: usize) -> Result<()> {
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::config("n", format!("grid size must be a power of two >= 4, got {n}")));
    }
    Ok(())
}

impl ScalarField {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        check_n(n)?;
        if values.len() != n * n {
            return Err(Error::config("values", format!("expected {} values, got {}", n * n, values.len())));
        }
        Ok(ScalarField { n, values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::from_values(n, vec![c; n * n])
    }

    /// Samples `f(x, y)` at the grid nodes.
    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        check_n(n)?;
        let h = 2.0 * PI / n as f64;
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                values.push(f(i as f64 * h, j as f64 * h));
            }
        }
        Ok(ScalarField { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[(j % self.n) * self.n + i % self.n]
    }

    /// Node spacing `2 pi / n`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        assert_eq!(self.n, other.n, "grid size mismatch");
        ScalarField {
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn plus(&self, other: &ScalarField) -> ScalarField {
        self.zip(other, |a, b| a + b)
    }

    pub fn minus(&self, other: &ScalarField) -> ScalarField {
        self.zip(other, |a, b| a - b)
    }

    pub fn times(&self, other: &ScalarField) -> ScalarField {
        self.zip(other, |a, b| a * b)
    }

    pub fn scaled(&self, c: f64) -> ScalarField {
        self.map(|v| c * v)
    }

    /// Riemann sum over the torus; spectrally accurate for smooth periodic data.
    pub fn integral(&self) -> f64 {
        let h = self.spacing();
        self.values.iter().sum::<f64>() * h * h
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `(int |f|^2 dx)^(1/2)`.
    pub fn l2(&self) -> f64 {
        let h = self.spacing();
        (self.values.iter().map(|v| v * v).sum::<f64>()).sqrt() * h
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_diff(&self, other: &ScalarField) -> f64 {
        self.minus(other).max_abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: ScalarField,
    pub y: ScalarField,
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField) -> Result<Self> {
        if x.n != y.n {
            return Err(Error::config("n", "vector components differ in grid size"));
        }
        Ok(VectorField { x, y })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64, f64) -> (f64, f64)) -> Result<Self> {
        Ok(VectorField {
            x: ScalarField::from_fn(n, |x, y| f(x, y).0)?,
            y: ScalarField::from_fn(n, |x, y| f(x, y).1)?,
        })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Ok(VectorField {
            x: ScalarField::constant(n, 0.0)?,
            y: ScalarField::constant(n, 0.0)?,
        })
    }

    pub fn n(&self) -> usize {
        self.x.n
    }

    pub fn component(&self, j: usize) -> &ScalarField {
        if j == 0 {
            &self.x
        } else {
            &self.y
        }
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> VectorField {
        VectorField {
            x: f(&self.x),
            y: f(&self.y),
        }
    }

    pub fn minus(&self, other: &VectorField) -> VectorField {
        VectorField {
            x: self.x.minus(&other.x),
            y: self.y.minus(&other.y),
        }
    }

    /// Pointwise `|u|^2`.
    pub fn norm_sq(&self) -> ScalarField {
        self.x.zip(&self.y, |a, b| a * a + b * b)
    }

    pub fn l2(&self) -> f64 {
        self.x.l2().hypot(self.y.l2())
    }
}

/// Antisymmetric matrix field `w^{j,k}`. In two dimensions it is fixed by
/// the single component `w^{1,2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    w12: ScalarField,
}

impl MatrixField {
    pub fn from_w12(w12: ScalarField) -> Self {
        MatrixField { w12 }
    }

    pub fn w12(&self) -> &ScalarField {
        &self.w12
    }

    /// Component `w^{j,k}` with zero-based indices.
    pub fn get(&self, j: usize, k: usize) -> ScalarField {
        match (j, k) {
            (0, 1) => self.w12.clone(),
            (1, 0) => self.w12.scaled(-1.0),
            _ => self.w12.map(|_| 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Scalar,
    Vector,
}
