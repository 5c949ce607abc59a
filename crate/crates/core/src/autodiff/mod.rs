//! Forward evaluation and exact differentiation of tanh MLPs.
//!
//! Input derivatives (up to second order in `x` and `t`) are propagated
//! analytically layer by layer together with the values, so the results are
//! exact up to rounding rather than finite-difference approximations. The
//! parameter gradient of a scalar objective is accumulated by a hand-derived
//! reverse sweep over the same propagation, which makes third-order mixed
//! differentiation (parameters of an objective that consumes second-order
//! input derivatives) available without a tape.

mod bundle;
mod engine;
mod network;
#[cfg(test)]
mod tests;

pub use bundle::{DerivativeBundle, DerivativeRequest};
pub use engine::{evaluate, input_derivatives, parameter_gradient, parameter_gradient_with_bundle, BatchObjective};
pub use network::{Activation, Layer, NetworkConfig, NetworkParams};
