//! Glorot initialization, the cosine learning-rate schedule, and Adam.

use ndarray::Array1;
use rand::Rng;

use crate::autodiff::{NetworkConfig, NetworkParams};
use crate::error::{Error, Result};

/// Glorot-uniform weights (bound `sqrt(6 / (fan_in + fan_out))`), zero
/// biases. Deterministic for a fixed generator state; entries are drawn
/// layer by layer in row-major order.
pub fn init_network<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> Result<NetworkParams> {
    config.validate()?;
    let mut params = NetworkParams::zeros(config);
    for layer in &mut params.layers {
        let fan_out = layer.weights.nrows();
        let fan_in = layer.weights.ncols();
        let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for w in layer.weights.iter_mut() {
            *w = rng.gen_range(-bound..bound);
        }
    }
    Ok(params)
}

/// Cosine annealing: `base * (1 + cos(pi * iteration / total)) / 2`.
pub fn cosine_lr(iteration: u64, total: u64, base: f64) -> Result<f64> {
    if total == 0 {
        return Err(Error::Argument("schedule length must be positive".into()));
    }
    if iteration > total {
        return Err(Error::Argument(format!(
            "iteration {iteration} beyond schedule length {total}"
        )));
    }
    let phase = std::f64::consts::PI * iteration as f64 / total as f64;
    Ok(base * 0.5 * (1.0 + phase.cos()))
}

/// Adam moment estimates and step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub first_moment: Array1<f64>,
    pub second_moment: Array1<f64>,
    pub step: u64,
}

impl OptimizerState {
    pub fn new(parameter_count: usize) -> Self {
        OptimizerState {
            first_moment: Array1::zeros(parameter_count),
            second_moment: Array1::zeros(parameter_count),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(
    state: &mut OptimizerState,
    params: &mut Array1<f64>,
    grad: &Array1<f64>,
    rate: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
) -> Result<()> {
    if grad.len() != params.len() || grad.len() != state.first_moment.len() {
        return Err(Error::Argument(format!(
            "gradient length {} does not match {} parameters",
            grad.len(),
            params.len()
        )));
    }
    if grad.iter().any(|g| !g.is_finite()) {
        return Err(Error::Numerical("non-finite gradient in Adam step".into()));
    }

    state.step += 1;
    let t = state.step as i32;
    let bias1 = 1.0 - beta1.powi(t);
    let bias2 = 1.0 - beta2.powi(t);
    for i in 0..params.len() {
        let g = grad[i];
        let m = beta1 * state.first_moment[i] + (1.0 - beta1) * g;
        let v = beta2 * state.second_moment[i] + (1.0 - beta2) * g * g;
        state.first_moment[i] = m;
        state.second_moment[i] = v;
        let m_hat = m / bias1;
        let v_hat = v / bias2;
        params[i] -= rate * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}
