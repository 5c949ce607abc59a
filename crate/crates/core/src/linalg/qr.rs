//! Householder QR with column pivoting (Businger-Golub).
//!
//! Only the pivot sequence and `|diag(R)|` are returned; the samplers never
//! need the explicit factors.

use ndarray::Array2;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Pivot sequence of a column-pivoted QR factorization.
#[derive(Debug, Clone)]
pub struct PivotResult {
    /// Original column indices in selection order; a permutation of
    /// `0..cols`. Entry `k` is the column chosen at elimination step `k`.
    pub pivot_order: Vec<usize>,
    /// `|R[k, k]|` for `k < min(rows, cols)`, non-increasing.
    pub r_diagonal: Vec<f64>,
}

impl PivotResult {
    /// The first `k` pivots.
    pub fn leading(&self, k: usize) -> &[usize] {
        &self.pivot_order[..k]
    }
}

/// Column-pivoted QR of `a`.
///
/// At each step the remaining column with the largest residual norm (after
/// orthogonalization against the columns already selected) is chosen; ties
/// break toward the lowest original column index. An all-zero input has no
/// meaningful pivot and is rejected.
pub fn qr_column_pivot(a: &DenseMatrix) -> Result<PivotResult> {
    let (rows, cols) = a.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::Argument("qr_column_pivot of an empty matrix".into()));
    }

    let mut work: Array2<f64> = a.clone();
    // perm[j] = original index of the column currently stored at position j.
    let mut perm: Vec<usize> = (0..cols).collect();
    // Squared trailing norms, downdated per step and recomputed when
    // cancellation makes the downdate unreliable.
    let mut norms: Vec<f64> = (0..cols)
        .map(|j| work.column(j).iter().map(|v| v * v).sum())
        .collect();
    let norms_ref: Vec<f64> = norms.clone();

    if norms.iter().all(|&n| n == 0.0) {
        return Err(Error::Numerical("rank zero, no pivots".into()));
    }

    let steps = rows.min(cols);
    let mut r_diagonal = Vec::with_capacity(steps);

    for k in 0..steps {
        // Select the remaining column of maximal residual norm, lowest
        // original index on ties.
        let mut best = k;
        for j in (k + 1)..cols {
            let better = norms[j] > norms[best]
                || (norms[j] == norms[best] && perm[j] < perm[best]);
            if better {
                best = j;
            }
        }
        if best != k {
            swap_columns(&mut work, k, best);
            perm.swap(k, best);
            norms.swap(k, best);
        }

        // Householder reflector annihilating work[k+1.., k].
        let alpha = householder_in_place(&mut work, k);
        r_diagonal.push(alpha.abs());

        // Downdate trailing norms; recompute when the running value has
        // shrunk enough that cancellation dominates.
        for j in (k + 1)..cols {
            let h = work[[k, j]];
            norms[j] -= h * h;
            if norms[j] < 1e-12 * norms_ref[perm[j]] {
                norms[j] = work
                    .column(j)
                    .iter()
                    .skip(k + 1)
                    .map(|v| v * v)
                    .sum::<f64>();
            }
        }
    }

    // Append the unselected columns so the order covers every column;
    // they keep the tie-break convention (ascending original index).
    let mut pivot_order: Vec<usize> = perm[..steps].to_vec();
    if cols > steps {
        let mut rest: Vec<usize> = perm[steps..].to_vec();
        rest.sort_unstable();
        pivot_order.extend(rest);
    }

    Ok(PivotResult {
        pivot_order,
        r_diagonal,
    })
}

fn swap_columns(a: &mut Array2<f64>, i: usize, j: usize) {
    let rows = a.nrows();
    for r in 0..rows {
        a.swap([r, i], [r, j]);
    }
}

/// Apply a Householder reflector that zeroes `a[k+1.., k]`, updating the
/// trailing submatrix. Returns the resulting `R[k, k]`.
fn householder_in_place(a: &mut Array2<f64>, k: usize) -> f64 {
    let (rows, cols) = a.dim();
    let norm: f64 = (k..rows).map(|i| a[[i, k]] * a[[i, k]]).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let alpha = if a[[k, k]] >= 0.0 { -norm } else { norm };

    // v = x - alpha e1, normalized so v[0] = 1.
    let v0 = a[[k, k]] - alpha;
    if v0 == 0.0 {
        a[[k, k]] = alpha;
        return alpha;
    }
    let mut v = vec![1.0; rows - k];
    for i in (k + 1)..rows {
        v[i - k] = a[[i, k]] / v0;
    }
    let vtv: f64 = v.iter().map(|x| x * x).sum();
    let beta = 2.0 / vtv;

    for j in k..cols {
        let mut dot = 0.0;
        for i in k..rows {
            dot += v[i - k] * a[[i, j]];
        }
        let scale = beta * dot;
        for i in k..rows {
            a[[i, j]] -= scale * v[i - k];
        }
    }
    a[[k, k]] = alpha;
    for i in (k + 1)..rows {
        a[[i, k]] = 0.0;
    }
    alpha
}
