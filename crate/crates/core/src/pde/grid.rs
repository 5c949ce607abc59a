//! Evaluation grids over the closed space-time domain.

use ndarray::Array2;

use crate::domain::{Point, T_MAX, T_MIN, X_MAX, X_MIN};
use crate::error::{Error, Result};

/// Tensor grid resolution. The default test grid is 256 x 100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub nt: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { nx: 256, nt: 100 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.nt < 2 {
            return Err(Error::Argument("grid needs at least 2 points per axis".into()));
        }
        Ok(())
    }

    /// Spatial nodes, endpoints included.
    pub fn xs(&self) -> Vec<f64> {
        linspace(X_MIN, X_MAX, self.nx)
    }

    /// Temporal nodes, endpoints included.
    pub fn ts(&self) -> Vec<f64> {
        linspace(T_MIN, T_MAX, self.nt)
    }

    /// All grid points in x-major order (`index = ix * nt + it`), matching
    /// the layout of [`ReferenceGrid::values`].
    pub fn points(&self) -> Vec<Point> {
        let xs = self.xs();
        let ts = self.ts();
        let mut pts = Vec::with_capacity(self.nx * self.nt);
        for &x in &xs {
            for &t in &ts {
                pts.push(Point::new(x, t));
            }
        }
        pts
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + i as f64 * step })
        .collect()
}

/// A solution sampled on a tensor grid, `values[[ix, it]]`.
#[derive(Debug, Clone)]
pub struct ReferenceGrid {
    pub spec: GridSpec,
    /// Short solver description persisted with the grid (method + key
    /// parameters) so cached files are self-describing.
    pub solver: String,
    pub values: Array2<f64>,
}

impl ReferenceGrid {
    pub fn new(spec: GridSpec, solver: impl Into<String>, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (spec.nx, spec.nt) {
            return Err(Error::Argument(format!(
                "grid values {:?} do not match spec {}x{}",
                values.dim(),
                spec.nx,
                spec.nt
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("reference grid has non-finite values".into()));
        }
        Ok(ReferenceGrid {
            spec,
            solver: solver.into(),
            values,
        })
    }

    /// Values flattened in the same x-major order as [`GridSpec::points`].
    pub fn flat(&self) -> &[f64] {
        self.values.as_slice().expect("standard layout")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout_is_x_major() {
        let spec = GridSpec { nx: 3, nt: 2 };
        let pts = spec.points();
        assert_eq!(pts.len(), 6);
        assert_eq!((pts[0].x, pts[0].t), (-1.0, 0.0));
        assert_eq!((pts[1].x, pts[1].t), (-1.0, 1.0));
        assert_eq!((pts[2].x, pts[2].t), (0.0, 0.0));
        assert_eq!((pts[5].x, pts[5].t), (1.0, 1.0));
    }

    #[test]
    fn default_is_paper_grid() {
        let spec = GridSpec::default();
        assert_eq!((spec.nx, spec.nt), (256, 100));
        assert_eq!(spec.xs().len(), 256);
        assert_eq!(*spec.ts().last().unwrap(), 1.0);
    }
}
