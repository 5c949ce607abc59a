//! Randomized SVD with Gaussian range finding and power iteration.

use ndarray::Array2;
use rand::Rng;

use super::svd::{svd, SvdResult};
use super::DenseMatrix;
use crate::error::{Error, Result};

/// Approximate the `rank` leading singular triplets of `a`.
///
/// A Gaussian sketch of width `rank + oversample` is pushed through
/// `power_iters` rounds of subspace iteration (re-orthonormalized each
/// half-step), then the small projected matrix is decomposed exactly and the
/// factors lifted back. Deterministic for a fixed generator state.
pub fn randomized_svd<R: Rng + ?Sized>(
    a: &DenseMatrix,
    rank: usize,
    oversample: usize,
    power_iters: usize,
    rng: &mut R,
) -> Result<SvdResult> {
    let (rows, cols) = a.dim();
    if rank == 0 {
        return Err(Error::Argument("randomized_svd rank must be positive".into()));
    }
    let sketch = rank + oversample;
    if sketch > rows.min(cols) {
        return Err(Error::Argument(format!(
            "sketch width {sketch} exceeds min(rows, cols) = {}",
            rows.min(cols)
        )));
    }

    let omega = Array2::<f64>::from_shape_fn((cols, sketch), |_| standard_normal(rng));
    let mut q = orthonormalize(a.dot(&omega))?;
    for _ in 0..power_iters {
        let z = orthonormalize(a.t().dot(&q))?;
        q = orthonormalize(a.dot(&z))?;
    }

    // Project, decompose the small matrix, lift the left factor back.
    let b = q.t().dot(a); // sketch x cols
    let small = svd(&b)?;
    let keep = rank.min(small.singular_values.len());

    let left = q.dot(&small.left_vectors.slice(ndarray::s![.., ..keep]));
    let values = small.singular_values.slice(ndarray::s![..keep]).to_owned();
    let right = small.right_vectors.slice(ndarray::s![.., ..keep]).to_owned();

    Ok(SvdResult {
        left_vectors: left,
        singular_values: values,
        right_vectors: right,
    })
}

/// Box-Muller standard normal draw; two uniforms per call keeps the stream
/// layout independent of any cached spare value.
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        if u1 > f64::MIN_POSITIVE {
            return (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        }
    }
}

/// Modified Gram-Schmidt with a second pass; columns of the result are
/// orthonormal to near machine precision for full-rank input.
fn orthonormalize(mut y: Array2<f64>) -> Result<Array2<f64>> {
    let (rows, cols) = y.dim();
    for j in 0..cols {
        for _pass in 0..2 {
            for i in 0..j {
                let mut dot = 0.0;
                for r in 0..rows {
                    dot += y[[r, i]] * y[[r, j]];
                }
                for r in 0..rows {
                    y[[r, j]] -= dot * y[[r, i]];
                }
            }
        }
        let norm: f64 = y.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical(
                "rank-deficient sketch in randomized range finder".into(),
            ));
        }
        for r in 0..rows {
            y[[r, j]] /= norm;
        }
    }
    Ok(y)
}
