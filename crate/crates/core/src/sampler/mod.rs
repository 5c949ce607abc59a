//! Collocation point samplers and the contract the training loop drives
//! them through.
//!
//! Each iteration the loop hands the sampler the residuals from the loss
//! pass (and, if the sampler watches extra points, residuals at those), then
//! offers an update opportunity with a residual evaluator for the current
//! parameters. Samplers own their point sets; the loop owns the parameters.

pub mod baseline;
pub mod qrdeim;
mod set;

pub use baseline::{
    hammersley_points, r3_update, rad_update, rar_d_update, rar_g_update, uniform_points,
    FixedSampler, R3Sampler, RadSampler, RandomResampleSampler, RarDSampler, RarGSampler,
};
pub use qrdeim::{
    convergence_degrees, qrdeim_indices, qrdeim_r_indices, select_rank, ConvergenceTracker,
    EnergyConvention, QrDeimConfig, QrDeimRConfig, QrDeimRSampler, QrDeimSampler, SnapshotBuffer,
    UpdateDiagnostics,
};
pub use set::TrainingSet;

use ndarray::Array1;
use rand_chacha::ChaCha8Rng;

use crate::domain::Point;
use crate::error::Result;

/// Residual evaluation at arbitrary points with the current parameters.
pub type ResidualEval<'a> = dyn Fn(&[Point]) -> Result<Array1<f64>> + 'a;

/// What an update opportunity produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateOutcome {
    /// No update was due this iteration.
    NotDue,
    /// The sampler ran its update; `changed` says whether the training set
    /// differs from before.
    Ran { changed: bool },
}

/// Sampling-cadence parameters shared by the adaptive strategies.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SamplerSchedule {
    pub initial_points: usize,
    pub interval: u64,
    pub points_per_update: usize,
    pub pool_size: usize,
}

impl SamplerSchedule {
    /// Growing-set refinement defaults: 1,000 initial points, 10 added per
    /// 1,000-iteration interval from a 10,000-point pool.
    pub fn growing_refinement() -> Self {
        SamplerSchedule {
            initial_points: 1000,
            interval: 1000,
            points_per_update: 10,
            pool_size: 10_000,
        }
    }

    /// Full-release defaults: 2,000 points resampled every 1,000 iterations
    /// (pool used only by the residual-PDF strategies).
    pub fn full_release() -> Self {
        SamplerSchedule {
            initial_points: 2000,
            interval: 1000,
            points_per_update: 2000,
            pool_size: 10_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.interval < 1 {
            return Err(crate::error::Error::Config("interval must be >= 1".into()));
        }
        if self.initial_points == 0 {
            return Err(crate::error::Error::Config("initial_points must be >= 1".into()));
        }
        Ok(())
    }
}

/// A collocation strategy driven by the training loop.
pub trait Sampler {
    fn name(&self) -> &'static str;

    /// The current training collocation set.
    fn training_points(&self) -> &[Point];

    /// Points whose residuals the sampler observes every iteration in
    /// addition to the training residuals (the snapshot set for QR-DEIM).
    fn watch_points(&self) -> Option<&[Point]> {
        None
    }

    /// Per-iteration observation hook. `train_residuals` come from the loss
    /// pass (parameters before the optimizer step); `watch_residuals` are
    /// evaluated at [`watch_points`](Sampler::watch_points) with the updated
    /// parameters.
    fn observe(
        &mut self,
        iteration: u64,
        train_residuals: &[f64],
        watch_residuals: Option<&[f64]>,
    ) -> Result<()> {
        let _ = (iteration, train_residuals, watch_residuals);
        Ok(())
    }

    /// Update opportunity, offered every iteration after `observe`; the
    /// sampler decides whether its cadence makes an update due.
    fn update(
        &mut self,
        iteration: u64,
        evaluator: &ResidualEval,
        rng: &mut ChaCha8Rng,
    ) -> Result<UpdateOutcome> {
        let _ = (iteration, evaluator, rng);
        Ok(UpdateOutcome::NotDue)
    }

    /// Structured per-update records, for strategies that keep them.
    fn update_diagnostics(&self) -> &[UpdateDiagnostics] {
        &[]
    }
}
