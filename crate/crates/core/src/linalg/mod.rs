//! Dense factorizations used by the collocation samplers: thin SVD, QR with
//! column pivoting, randomized SVD, and norm-proportional column sampling.

mod qr;
mod rsvd;
mod sampling;
mod svd;

pub use qr::{qr_column_pivot, PivotResult};
pub use rsvd::randomized_svd;
pub use sampling::leverage_sample_columns;
pub use svd::{svd, SvdResult};

/// Dense row-major matrix of 64-bit reals.
pub type DenseMatrix = ndarray::Array2<f64>;
