//! Reference solutions for the benchmark problems.
//!
//! Wave and convection have closed forms; Burgers' uses the Cole-Hopf
//! transform with adaptive Gauss-Hermite quadrature; Allen-Cahn is integrated
//! by a Fourier spectral ETDRK4 scheme. Grids are cached to disk because the
//! two numerical solvers are expensive relative to the metric evaluation.

mod cache;
pub mod etdrk4;
pub mod quadrature;

use std::f64::consts::PI;
use std::path::Path;

use ndarray::Array2;

use super::grid::{GridSpec, ReferenceGrid};
use super::problem::{PdeKind, PdeProblem, CONVECTION_SPEED};
use crate::error::Result;

/// Quadrature settling tolerance for the Cole-Hopf evaluation.
pub const BURGERS_QUAD_TOL: f64 = 1e-9;
pub const BURGERS_MAX_NODES: usize = 4096;

/// Compute the reference solution on the given grid.
pub fn reference_solution(problem: &PdeProblem, spec: GridSpec) -> Result<ReferenceGrid> {
    spec.validate()?;
    let xs = spec.xs();
    let ts = spec.ts();
    match problem.kind {
        PdeKind::Wave => {
            let mut values = Array2::<f64>::zeros((spec.nx, spec.nt));
            for (ix, &x) in xs.iter().enumerate() {
                for (it, &t) in ts.iter().enumerate() {
                    values[[ix, it]] = (PI * x).sin() * (2.0 * PI * t).cos()
                        + 0.5 * (4.0 * PI * x).sin() * (8.0 * PI * t).cos();
                }
            }
            ReferenceGrid::new(spec, "closed-form", values)
        }
        PdeKind::Convection => {
            let mut values = Array2::<f64>::zeros((spec.nx, spec.nt));
            for (ix, &x) in xs.iter().enumerate() {
                for (it, &t) in ts.iter().enumerate() {
                    values[[ix, it]] = (PI * (x - CONVECTION_SPEED * t)).sin();
                }
            }
            ReferenceGrid::new(spec, "closed-form", values)
        }
        PdeKind::Burgers => {
            let values =
                quadrature::burgers_cole_hopf(&xs, &ts, BURGERS_QUAD_TOL, BURGERS_MAX_NODES)?;
            ReferenceGrid::new(
                spec,
                format!("cole-hopf-gauss-hermite-tol{BURGERS_QUAD_TOL:e}"),
                values,
            )
        }
        PdeKind::AllenCahn => {
            let values = etdrk4::allen_cahn_etdrk4(
                &xs,
                &ts,
                problem.reaction_sign,
                etdrk4::DEFAULT_DT,
                etdrk4::SPECTRAL_MODES,
            )?;
            ReferenceGrid::new(
                spec,
                format!(
                    "etdrk4-n{}-dt{:e}-{:?}",
                    etdrk4::SPECTRAL_MODES,
                    etdrk4::DEFAULT_DT,
                    problem.reaction_sign
                ),
                values,
            )
        }
    }
}

/// Load the reference grid from `dir`, computing and storing it on a miss.
pub fn reference_solution_cached(
    problem: &PdeProblem,
    spec: GridSpec,
    dir: &Path,
) -> Result<ReferenceGrid> {
    let key = problem.cache_key();
    let path = cache::cache_path(dir, &key, spec);
    if path.exists() {
        return cache::load(&path, &key, spec);
    }
    let grid = reference_solution(problem, spec)?;
    cache::store(&path, &key, &grid)?;
    Ok(grid)
}
