//! QR-DEIM collocation point updates, full and randomized.
//!
//! Residuals at a separate snapshot set are recorded every iteration; after
//! a period of `P` iterations the snapshot matrix is factored, new training
//! points are chosen at the pivot locations of a column-pivoted QR of the
//! leading left singular vectors, and the same number of already-converged
//! training points (largest convergence degree) are released. A safeguard
//! skips the swap whenever any of the top convergence degrees is negative,
//! i.e. a candidate for release actually got worse.

use ndarray::Array2;
use rand_chacha::ChaCha8Rng;

use super::baseline::uniform_points;
use super::set::TrainingSet;
use super::{ResidualEval, Sampler, UpdateOutcome};
use crate::domain::{uniform_interior_point, Point};
use crate::error::{Error, Result};
use crate::linalg::{leverage_sample_columns, qr_column_pivot, randomized_svd, svd, DenseMatrix};

/// Internal randomized-SVD parameters for the randomized variant (sketch
/// oversampling and power iterations; standard choices for decaying
/// spectra).
pub const RSVD_OVERSAMPLE: usize = 10;
pub const RSVD_POWER_ITERS: usize = 2;

/// Tiny floor applied to residual magnitudes before the log ratio, so a
/// fully converged point ranks highest instead of producing NaN.
const MAGNITUDE_FLOOR: f64 = 1e-300;

/// How the energy criterion weighs the singular values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyConvention {
    /// Plain sum of singular values.
    #[default]
    SumValues,
    /// Sum of squared singular values.
    SumSquares,
}

/// Parameters of the full QR-DEIM update.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QrDeimConfig {
    pub n_snapshot: usize,
    pub period: u64,
    pub energy_threshold: f64,
    pub energy_convention: EnergyConvention,
}

impl Default for QrDeimConfig {
    fn default() -> Self {
        QrDeimConfig {
            n_snapshot: 1000,
            period: 1000,
            energy_threshold: 0.005,
            energy_convention: EnergyConvention::SumValues,
        }
    }
}

impl QrDeimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_snapshot == 0 || self.period == 0 {
            return Err(Error::Config("snapshot count and period must be positive".into()));
        }
        if !(self.energy_threshold > 0.0 && self.energy_threshold < 1.0) {
            return Err(Error::Config(format!(
                "energy threshold must lie in (0, 1), got {}",
                self.energy_threshold
            )));
        }
        Ok(())
    }
}

/// Parameters of the randomized QR-DEIM update.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QrDeimRConfig {
    pub n_snapshot: usize,
    pub period: u64,
    pub target_rank: usize,
    pub oversample: usize,
}

impl Default for QrDeimRConfig {
    fn default() -> Self {
        QrDeimRConfig {
            n_snapshot: 1000,
            period: 1000,
            target_rank: 100,
            oversample: 50,
        }
    }
}

impl QrDeimRConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_snapshot == 0 || self.period == 0 {
            return Err(Error::Config("snapshot count and period must be positive".into()));
        }
        if self.target_rank == 0 {
            return Err(Error::Config("target rank must be >= 1".into()));
        }
        if self.target_rank + self.oversample > self.n_snapshot {
            return Err(Error::Config(format!(
                "rank {} + oversample {} exceeds snapshot count {}",
                self.target_rank, self.oversample, self.n_snapshot
            )));
        }
        Ok(())
    }
}

/// Residual history over the snapshot set: one column per iteration, up to
/// `period` columns.
#[derive(Debug, Clone)]
pub struct SnapshotBuffer {
    snapshot_points: Vec<Point>,
    columns: Vec<Vec<f64>>,
    period: usize,
}

impl SnapshotBuffer {
    pub fn new(snapshot_points: Vec<Point>, period: usize) -> Self {
        SnapshotBuffer {
            snapshot_points,
            columns: Vec::with_capacity(period),
            period,
        }
    }

    pub fn snapshot_points(&self) -> &[Point] {
        &self.snapshot_points
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    /// Full once `period` columns have been recorded.
    pub fn is_ready(&self) -> bool {
        self.columns.len() == self.period
    }

    /// Append one residual column.
    pub fn record_snapshot(&mut self, residuals: &[f64]) -> Result<()> {
        if residuals.len() != self.snapshot_points.len() {
            return Err(Error::Argument(format!(
                "residual vector length {} does not match {} snapshot points",
                residuals.len(),
                self.snapshot_points.len()
            )));
        }
        if self.is_ready() {
            return Err(Error::Logic(
                "snapshot buffer already full; an update must run first".into(),
            ));
        }
        self.columns.push(residuals.to_vec());
        Ok(())
    }

    /// Assemble the `n_snapshot x period` snapshot matrix.
    pub fn matrix(&self) -> DenseMatrix {
        let n = self.snapshot_points.len();
        let p = self.columns.len();
        let mut m = Array2::<f64>::zeros((n, p));
        for (j, col) in self.columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[[i, j]] = v;
            }
        }
        m
    }

    /// Replace the snapshot points and drop all recorded columns.
    pub fn reset(&mut self, snapshot_points: Vec<Point>) {
        self.snapshot_points = snapshot_points;
        self.columns.clear();
    }

    #[cfg(test)]
    pub(crate) fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }
}

/// Residual-magnitude baseline for the current training set.
#[derive(Debug, Clone, Default)]
pub struct ConvergenceTracker {
    baseline: Vec<f64>,
}

impl ConvergenceTracker {
    pub fn is_initialized(&self) -> bool {
        !self.baseline.is_empty()
    }

    pub fn baseline(&self) -> &[f64] {
        &self.baseline
    }

    pub fn set_baseline(&mut self, magnitudes: Vec<f64>) {
        self.baseline = magnitudes;
    }
}

/// Smallest rank capturing all but `epsilon` of the snapshot energy:
/// `k = min { i : 1 - sum_{j<=i} s_j / sum_j s_j <= epsilon }`.
pub fn select_rank(singular_values: &[f64], epsilon: f64) -> Result<usize> {
    select_rank_with(singular_values, epsilon, EnergyConvention::SumValues)
}

/// [`select_rank`] with a configurable weighting of the spectrum.
pub fn select_rank_with(
    singular_values: &[f64],
    epsilon: f64,
    convention: EnergyConvention,
) -> Result<usize> {
    if singular_values.is_empty() {
        return Err(Error::Argument("empty spectrum".into()));
    }
    let weigh = |s: f64| match convention {
        EnergyConvention::SumValues => s,
        EnergyConvention::SumSquares => s * s,
    };
    let total: f64 = singular_values.iter().map(|&s| weigh(s)).sum();
    if total == 0.0 {
        return Err(Error::Numerical("zero residual energy".into()));
    }
    let mut cumulative = 0.0;
    for (i, &s) in singular_values.iter().enumerate() {
        cumulative += weigh(s);
        // 1 - cumulative/total <= eps, rearranged to avoid the division.
        if total - cumulative <= epsilon * total {
            return Ok(i + 1);
        }
    }
    Ok(singular_values.len())
}

/// DEIM index selection: the first `k` pivots of a column-pivoted QR of
/// `V_k^T`.
pub fn qrdeim_indices(vk: &DenseMatrix) -> Result<Vec<usize>> {
    let k = vk.ncols();
    let pivots = qr_column_pivot(&vk.t().to_owned())?;
    if pivots.r_diagonal.len() < k || pivots.r_diagonal[k - 1] == 0.0 {
        return Err(Error::Numerical(format!(
            "basis is rank-deficient below k = {k}"
        )));
    }
    Ok(pivots.pivot_order[..k].to_vec())
}

/// Randomized DEIM index selection: leverage-sample `k + z` columns of
/// `V_k^T`, pivot the reduced matrix, and map the pivots back through the
/// sampled index list.
pub fn qrdeim_r_indices(
    vk: &DenseMatrix,
    k: usize,
    oversample: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    if vk.ncols() != k {
        return Err(Error::Argument(format!(
            "basis has {} columns, expected k = {k}",
            vk.ncols()
        )));
    }
    let vkt = vk.t().to_owned();
    let take = (k + oversample).min(vkt.ncols());

    // A degenerate draw can produce a reduced matrix of rank < k; one
    // re-draw is allowed before giving up.
    for attempt in 0..2 {
        let sampled = leverage_sample_columns(&vkt, take, rng)?;
        let mut reduced = Array2::<f64>::zeros((k, take));
        for (c, &j) in sampled.iter().enumerate() {
            reduced.column_mut(c).assign(&vkt.column(j));
        }
        let pivots = qr_column_pivot(&reduced)?;
        if pivots.r_diagonal.len() >= k && pivots.r_diagonal[k - 1] != 0.0 {
            return Ok(pivots.pivot_order[..k].iter().map(|&a| sampled[a]).collect());
        }
        if attempt == 0 {
            log::warn!("rank-deficient leverage sample, re-drawing once");
        }
    }
    Err(Error::Numerical(
        "leverage sampling produced a rank-deficient reduced matrix twice".into(),
    ))
}

/// Element-wise convergence degree `log2(old / new)`, with magnitudes
/// floored away from zero.
pub fn convergence_degrees(r_old: &[f64], r_new: &[f64]) -> Vec<f64> {
    debug_assert_eq!(r_old.len(), r_new.len());
    r_old
        .iter()
        .zip(r_new)
        .map(|(o, n)| (o.max(MAGNITUDE_FLOOR) / n.max(MAGNITUDE_FLOOR)).log2())
        .collect()
}

/// One structured record per update, for point-evolution diagnostics.
#[derive(Debug, Clone, serde::Serialize)]
pub struct UpdateDiagnostics {
    pub iteration: u64,
    pub k: usize,
    pub safeguard_skip: bool,
    pub selected_snapshot_indices: Vec<usize>,
    pub pruned_point_indices: Vec<usize>,
    pub leading_singular_values: Vec<f64>,
}

enum Variant {
    Full(QrDeimConfig),
    Randomized(QrDeimRConfig),
}

/// Shared update body for both variants (they differ only in how the basis
/// and `k` are produced).
fn apply_update(
    variant: &Variant,
    training: &mut TrainingSet,
    tracker: &mut ConvergenceTracker,
    buffer: &mut SnapshotBuffer,
    evaluator: &ResidualEval,
    rng: &mut ChaCha8Rng,
) -> Result<UpdateDiagnostics> {
    if !buffer.is_ready() {
        return Err(Error::Logic("update requested before the buffer filled".into()));
    }
    if !tracker.is_initialized() {
        return Err(Error::Logic("update requested before a residual baseline".into()));
    }

    let snapshot_matrix = buffer.matrix();
    let (k, basis, leading) = match variant {
        Variant::Full(cfg) => {
            let decomposition = svd(&snapshot_matrix)?;
            let values = decomposition.singular_values.as_slice().unwrap();
            let k = select_rank_with(values, cfg.energy_threshold, cfg.energy_convention)?;
            let leading = values[..k].to_vec();
            (k, decomposition.leading_left(k), leading)
        }
        Variant::Randomized(cfg) => {
            let k = cfg.target_rank;
            let decomposition =
                randomized_svd(&snapshot_matrix, k, RSVD_OVERSAMPLE, RSVD_POWER_ITERS, rng)?;
            let leading = decomposition.singular_values.to_vec();
            (k, decomposition.left_vectors, leading)
        }
    };
    if k > training.len() {
        return Err(Error::Argument(format!(
            "prune of k = {k} exceeds training set of {}",
            training.len()
        )));
    }

    let selected = match variant {
        Variant::Full(_) => qrdeim_indices(&basis)?,
        Variant::Randomized(cfg) => qrdeim_r_indices(&basis, k, cfg.oversample, rng)?,
    };

    // Convergence degrees from the tracked baseline and fresh residuals.
    let r_new: Vec<f64> = evaluator(training.points())?
        .iter()
        .map(|r| r.abs())
        .collect();
    let degrees = convergence_degrees(tracker.baseline(), &r_new);

    // Top-k degrees, ties toward the lower point index.
    let mut order: Vec<usize> = (0..degrees.len()).collect();
    order.sort_by(|&a, &b| {
        degrees[b]
            .partial_cmp(&degrees[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let top_k = &order[..k];
    let safeguard_skip = top_k.iter().any(|&i| degrees[i] < 0.0);

    if !safeguard_skip {
        let new_points: Vec<Point> = selected
            .iter()
            .map(|&i| buffer.snapshot_points()[i])
            .collect();
        training.swap_points(top_k, &new_points)?;
    }

    // Resample the snapshot set (disjoint from the training set), clear the
    // buffer, and rebase the tracker on the possibly-new set.
    let fresh = sample_disjoint(buffer.snapshot_points().len(), training, rng);
    buffer.reset(fresh);
    let rebased: Vec<f64> = evaluator(training.points())?
        .iter()
        .map(|r| r.abs())
        .collect();
    tracker.set_baseline(rebased);

    Ok(UpdateDiagnostics {
        iteration: 0, // caller stamps the iteration
        k,
        safeguard_skip,
        selected_snapshot_indices: selected,
        pruned_point_indices: if safeguard_skip {
            Vec::new()
        } else {
            top_k.to_vec()
        },
        leading_singular_values: leading,
    })
}

/// Uniform draws rejected against the training set (and against each other).
fn sample_disjoint(n: usize, training: &TrainingSet, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let p = uniform_interior_point(rng);
        if training.contains(&p) || points.iter().any(|q: &Point| q.x == p.x && q.t == p.t) {
            continue;
        }
        points.push(p);
    }
    points
}

/// Full QR-DEIM sampler.
pub struct QrDeimSampler {
    config: QrDeimConfig,
    training: TrainingSet,
    tracker: ConvergenceTracker,
    buffer: SnapshotBuffer,
    updates: Vec<UpdateDiagnostics>,
}

impl QrDeimSampler {
    pub fn new(config: QrDeimConfig, n_train: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        config.validate()?;
        let training = TrainingSet::new(uniform_points(n_train, rng)?, n_train)?;
        let snapshots = sample_disjoint(config.n_snapshot, &training, rng);
        Ok(QrDeimSampler {
            buffer: SnapshotBuffer::new(snapshots, config.period as usize),
            config,
            training,
            tracker: ConvergenceTracker::default(),
            updates: Vec::new(),
        })
    }

    pub fn updates(&self) -> &[UpdateDiagnostics] {
        &self.updates
    }
}

impl Sampler for QrDeimSampler {
    fn name(&self) -> &'static str {
        "qr_deim"
    }

    fn training_points(&self) -> &[Point] {
        self.training.points()
    }

    fn watch_points(&self) -> Option<&[Point]> {
        Some(self.buffer.snapshot_points())
    }

    fn observe(
        &mut self,
        _iteration: u64,
        train_residuals: &[f64],
        watch_residuals: Option<&[f64]>,
    ) -> Result<()> {
        if !self.tracker.is_initialized() {
            self.tracker
                .set_baseline(train_residuals.iter().map(|r| r.abs()).collect());
        }
        let snapshots = watch_residuals
            .ok_or_else(|| Error::Logic("qr-deim sampler needs snapshot residuals".into()))?;
        self.buffer.record_snapshot(snapshots)
    }

    fn update(
        &mut self,
        iteration: u64,
        evaluator: &ResidualEval,
        rng: &mut ChaCha8Rng,
    ) -> Result<UpdateOutcome> {
        if !self.buffer.is_ready() {
            return Ok(UpdateOutcome::NotDue);
        }
        let mut diag = apply_update(
            &Variant::Full(self.config),
            &mut self.training,
            &mut self.tracker,
            &mut self.buffer,
            evaluator,
            rng,
        )?;
        diag.iteration = iteration;
        let changed = !diag.safeguard_skip;
        self.updates.push(diag);
        Ok(UpdateOutcome::Ran { changed })
    }

    fn update_diagnostics(&self) -> &[UpdateDiagnostics] {
        &self.updates
    }
}

/// Randomized QR-DEIM sampler.
pub struct QrDeimRSampler {
    config: QrDeimRConfig,
    training: TrainingSet,
    tracker: ConvergenceTracker,
    buffer: SnapshotBuffer,
    updates: Vec<UpdateDiagnostics>,
}

impl QrDeimRSampler {
    pub fn new(config: QrDeimRConfig, n_train: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        config.validate()?;
        let training = TrainingSet::new(uniform_points(n_train, rng)?, n_train)?;
        let snapshots = sample_disjoint(config.n_snapshot, &training, rng);
        Ok(QrDeimRSampler {
            buffer: SnapshotBuffer::new(snapshots, config.period as usize),
            config,
            training,
            tracker: ConvergenceTracker::default(),
            updates: Vec::new(),
        })
    }

    pub fn updates(&self) -> &[UpdateDiagnostics] {
        &self.updates
    }
}

impl Sampler for QrDeimRSampler {
    fn name(&self) -> &'static str {
        "qr_deim_r"
    }

    fn training_points(&self) -> &[Point] {
        self.training.points()
    }

    fn watch_points(&self) -> Option<&[Point]> {
        Some(self.buffer.snapshot_points())
    }

    fn observe(
        &mut self,
        _iteration: u64,
        train_residuals: &[f64],
        watch_residuals: Option<&[f64]>,
    ) -> Result<()> {
        if !self.tracker.is_initialized() {
            self.tracker
                .set_baseline(train_residuals.iter().map(|r| r.abs()).collect());
        }
        let snapshots = watch_residuals
            .ok_or_else(|| Error::Logic("qr-deim-r sampler needs snapshot residuals".into()))?;
        self.buffer.record_snapshot(snapshots)
    }

    fn update(
        &mut self,
        iteration: u64,
        evaluator: &ResidualEval,
        rng: &mut ChaCha8Rng,
    ) -> Result<UpdateOutcome> {
        if !self.buffer.is_ready() {
            return Ok(UpdateOutcome::NotDue);
        }
        let mut diag = apply_update(
            &Variant::Randomized(self.config),
            &mut self.training,
            &mut self.tracker,
            &mut self.buffer,
            evaluator,
            rng,
        )?;
        diag.iteration = iteration;
        let changed = !diag.safeguard_skip;
        self.updates.push(diag);
        Ok(UpdateOutcome::Ran { changed })
    }

    fn update_diagnostics(&self) -> &[UpdateDiagnostics] {
        &self.updates
    }
}
