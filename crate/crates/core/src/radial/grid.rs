use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform radial grid on `[0, r_max]`.
///
/// Cell `i` is centered at `(i + 1/2) dr`; face `k` sits at `k dr` for
/// `k = 0..=n_cells`, so face 0 is the symmetry axis and face `n_cells` the
/// outer boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n_cells: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_cells: usize) -> Result<Self> {
        let g = RadialGrid { r_max, n_cells };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::config("grid.r_max", "must be positive and finite"));
        }
        if self.n_cells < 8 {
            return Err(Error::config("grid.n_cells", "need at least 8 cells"));
        }
        Ok(())
    }

    #[inline]
    pub fn dr(&self) -> f64 {
        self.r_max / self.n_cells as f64
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dr()
    }

    #[inline]
    pub fn face(&self, k: usize) -> f64 {
        k as f64 * self.dr()
    }

    /// Area of the ring occupied by cell `i`, `pi (R_{i+1}^2 - R_i^2) = 2 pi r_i dr`.
    #[inline]
    pub fn cell_area(&self, i: usize) -> f64 {
        2.0 * PI * self.center(i) * self.dr()
    }

    /// Dual-cell area attached to interior face `k`.
    #[inline]
    pub fn face_area(&self, k: usize) -> f64 {
        2.0 * PI * self.face(k) * self.dr()
    }

    /// Index of the cell containing `r`, clamped to the grid.
    pub fn cell_of(&self, r: f64) -> usize {
        let i = (r / self.dr()).floor();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.n_cells - 1)
        }
    }

    /// Index of the face nearest to `r`.
    pub fn nearest_face(&self, r: f64) -> usize {
        let k = (r / self.dr()).round();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.n_cells)
        }
    }

    pub fn refined(&self) -> Self {
        RadialGrid {
            n_cells: self.n_cells * 2,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let g = RadialGrid::new(4.0, 16).unwrap();
        assert_eq!(g.dr(), 0.25);
        assert_eq!(g.face(0), 0.0);
        assert_eq!(g.face(16), 4.0);
        assert_eq!(g.center(0), 0.125);
        let total: f64 = (0..16).map(|i| g.cell_area(i)).sum();
        assert!((total - PI * 16.0).abs() < 1e-12);
        assert_eq!(g.cell_of(0.3), 1);
        assert_eq!(g.cell_of(10.0), 15);
        assert_eq!(g.nearest_face(0.3), 1);
        assert!(RadialGrid::new(0.0, 16).is_err());
        assert!(RadialGrid::new(1.0, 2).is_err());
    }
}
