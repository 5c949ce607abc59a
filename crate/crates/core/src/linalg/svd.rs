//! Thin SVD backed by faer, with ordering and shape normalized.

use ndarray::{Array1, Array2};

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Thin singular value decomposition `a = U diag(s) V^T`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Left singular vectors, `rows x r` with `r = min(rows, cols)`.
    pub left_vectors: Array2<f64>,
    /// Singular values sorted non-increasing, length `r`.
    pub singular_values: Array1<f64>,
    /// Right singular vectors, `cols x r`.
    pub right_vectors: Array2<f64>,
}

impl SvdResult {
    pub fn rank_count(&self) -> usize {
        self.singular_values.len()
    }

    /// Reconstruct `U diag(s) V^T`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let scaled = &self.left_vectors * &self.singular_values;
        scaled.dot(&self.right_vectors.t())
    }

    /// First `k` left singular vectors as a `rows x k` matrix.
    pub fn leading_left(&self, k: usize) -> Array2<f64> {
        self.left_vectors.slice(ndarray::s![.., ..k]).to_owned()
    }
}

/// Thin SVD of a dense matrix.
///
/// Fails on empty or non-finite input, or if the underlying bidiagonal
/// iteration does not converge.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    let (rows, cols) = a.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::Argument("svd of an empty matrix".into()));
    }
    if let Some(idx) = a.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "svd input has non-finite entry at flat index {idx}"
        )));
    }

    let m = faer::Mat::<f64>::from_fn(rows, cols, |i, j| a[[i, j]]);
    let fsvd = m
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("svd did not converge: {e:?}")))?;

    let r = rows.min(cols);
    let mut left = Array2::<f64>::zeros((rows, r));
    let mut right = Array2::<f64>::zeros((cols, r));
    let mut values = Array1::<f64>::zeros(r);
    for j in 0..r {
        values[j] = fsvd.S()[j];
        for i in 0..rows {
            left[[i, j]] = fsvd.U()[(i, j)];
        }
        for i in 0..cols {
            right[[i, j]] = fsvd.V()[(i, j)];
        }
    }

    // faer already orders the values; re-sort defensively so the ordering
    // invariant is owned here rather than by the backend.
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    if order.windows(2).any(|w| w[0] > w[1]) {
        let values = order.iter().map(|&j| values[j]).collect::<Array1<f64>>();
        let left = reorder_columns(&left, &order);
        let right = reorder_columns(&right, &order);
        return Ok(SvdResult {
            left_vectors: left,
            singular_values: values,
            right_vectors: right,
        });
    }

    Ok(SvdResult {
        left_vectors: left,
        singular_values: values,
        right_vectors: right,
    })
}

fn reorder_columns(a: &Array2<f64>, order: &[usize]) -> Array2<f64> {
    let (rows, _) = a.dim();
    let mut out = Array2::<f64>::zeros((rows, order.len()));
    for (dst, &src) in order.iter().enumerate() {
        out.column_mut(dst).assign(&a.column(src));
    }
    out
}
