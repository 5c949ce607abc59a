//! Relative l2 error between prediction and truth vectors.

use crate::error::{Error, Result};

/// `||truth - pred||_2 / ||truth||_2`.
pub fn relative_l2(pred: &[f64], truth: &[f64]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::Argument(format!(
            "length mismatch: pred {} vs truth {}",
            pred.len(),
            truth.len()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (p, t) in pred.iter().zip(truth.iter()) {
        let d = t - p;
        num += d * d;
        den += t * t;
    }
    if den == 0.0 {
        return Err(Error::Argument("undefined relative error: zero truth norm".into()));
    }
    Ok((num / den).sqrt())
}
