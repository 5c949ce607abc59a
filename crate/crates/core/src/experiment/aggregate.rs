//! Aggregate statistics over repeated runs.

use crate::error::{Error, Result};

/// Mean and sample standard deviation of final errors across repeats.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AggregateReport {
    pub label: String,
    pub errors: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single run.
    pub std: f64,
    /// Set when only one run backs the statistics.
    pub single_sample: bool,
}

pub fn aggregate(label: impl Into<String>, errors: &[f64]) -> Result<AggregateReport> {
    if errors.is_empty() {
        return Err(Error::Argument("no records to aggregate".into()));
    }
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let std = if errors.len() == 1 {
        0.0
    } else {
        (errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(AggregateReport {
        label: label.into(),
        errors: errors.to_vec(),
        mean,
        std,
        single_sample: errors.len() == 1,
    })
}
