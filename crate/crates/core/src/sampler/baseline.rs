//! Fixed and prior adaptive baselines: uniform random, Hammersley, periodic
//! uniform resampling, RAR-G, RAR-D, RAD, and R3.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::set::TrainingSet;
use super::{ResidualEval, Sampler, SamplerSchedule, UpdateOutcome};
use crate::domain::{uniform_interior_point, Point};
use crate::error::{Error, Result};

/// `n` independent uniform draws over the open interior.
pub fn uniform_points<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::Argument("requested zero uniform points".into()));
    }
    Ok((0..n).map(|_| uniform_interior_point(rng)).collect())
}

/// Base-2 radical inverse (van der Corput sequence).
pub fn radical_inverse_base2(mut i: u64) -> f64 {
    let mut value = 0.0;
    let mut scale = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            value += scale;
        }
        scale *= 0.5;
        i >>= 1;
    }
    value
}

/// First `n` Hammersley points mapped onto the domain.
///
/// Unit-square coordinates are `(phi_2(i), i/n)`; a coordinate that lands
/// exactly on the lower boundary (the `i = 0` entry in each axis) is shifted
/// inward by half the `1/n` spacing so every point stays interior.
pub fn hammersley_points(n: usize) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::Argument("requested zero Hammersley points".into()));
    }
    let shift = 0.5 / n as f64;
    Ok((0..n)
        .map(|i| {
            let mut u = radical_inverse_base2(i as u64);
            let mut v = i as f64 / n as f64;
            if u == 0.0 {
                u = shift;
            }
            if v == 0.0 {
                v = shift;
            }
            Point::new(-1.0 + 2.0 * u, v)
        })
        .collect())
}

/// Append the `count` pool points of largest residual magnitude.
pub fn rar_g_update(
    set: &mut TrainingSet,
    pool: &[Point],
    pool_residuals: &[f64],
    count: usize,
) -> Result<()> {
    if count > pool.len() {
        return Err(Error::Argument(format!(
            "cannot take {count} points from a pool of {}",
            pool.len()
        )));
    }
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| {
        pool_residuals[b]
            .abs()
            .partial_cmp(&pool_residuals[a].abs())
            .unwrap()
            .then(a.cmp(&b))
    });
    let picked: Vec<Point> = order[..count].iter().map(|&i| pool[i]).collect();
    set.append(&picked)
}

/// Residual-power sampling weights: `|r|^k / mean(|r|^k) + c` with `k = 2`,
/// `c = 0`.
fn residual_squared_weights(residuals: &[f64]) -> Vec<f64> {
    residuals.iter().map(|r| r * r).collect()
}

/// Draw `count` distinct pool indices with replacement from the residual
/// PDF, re-drawing duplicates. Returns fewer than `count` only when the
/// distribution cannot produce more distinct indices within the attempt cap.
fn draw_distinct_from_pdf(
    weights: &[f64],
    count: usize,
    avoid: &dyn Fn(usize) -> bool,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    use rand::distributions::{Distribution, WeightedIndex};
    let dist = WeightedIndex::new(weights)
        .map_err(|_| Error::Numerical("degenerate residual distribution".into()))?;
    let mut picked = Vec::with_capacity(count);
    let mut taken = vec![false; weights.len()];
    let mut attempts = 0usize;
    let attempt_cap = 100 * count.max(1) + 10 * weights.len();
    while picked.len() < count && attempts < attempt_cap {
        attempts += 1;
        let j = dist.sample(rng);
        if taken[j] || avoid(j) {
            continue;
        }
        taken[j] = true;
        picked.push(j);
    }
    if picked.len() < count {
        log::warn!(
            "residual PDF could only produce {} of {count} distinct points",
            picked.len()
        );
    }
    Ok(picked)
}

/// RAD: release everything and draw a fresh same-size set from the pool with
/// probability proportional to squared residual magnitude.
pub fn rad_update(
    pool: &[Point],
    pool_residuals: &[f64],
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point>> {
    if pool_residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::Numerical("non-finite pool residuals".into()));
    }
    let weights = residual_squared_weights(pool_residuals);
    if weights.iter().sum::<f64>() == 0.0 {
        // Degenerate PDF: fall back to uniform over the pool.
        log::warn!("all pool residuals are zero; RAD falling back to uniform sampling");
        let mut order: Vec<usize> = (0..pool.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        return Ok(order[..n.min(pool.len())].iter().map(|&i| pool[i]).collect());
    }
    let mut picked = draw_distinct_from_pdf(&weights, n, &|_| false, rng)?;
    if picked.len() < n {
        // Fill the remainder uniformly from unused pool indices.
        let mut unused: Vec<usize> = (0..pool.len())
            .filter(|i| !picked.contains(i))
            .collect();
        while picked.len() < n && !unused.is_empty() {
            let at = rng.gen_range(0..unused.len());
            picked.push(unused.swap_remove(at));
        }
    }
    Ok(picked.into_iter().map(|i| pool[i]).collect())
}

/// RAR-D: append `count` points drawn from the same PDF as RAD to a growing
/// set.
pub fn rar_d_update(
    set: &mut TrainingSet,
    pool: &[Point],
    pool_residuals: &[f64],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if pool_residuals.iter().any(|r| !r.is_finite()) {
        return Err(Error::Numerical("non-finite pool residuals".into()));
    }
    let weights = residual_squared_weights(pool_residuals);
    if weights.iter().sum::<f64>() == 0.0 {
        log::warn!("all pool residuals are zero; RAR-D falling back to uniform sampling");
        let picked = uniform_points(count, rng)?;
        return set.append(&picked);
    }
    let avoid = |j: usize| set.contains(&pool[j]);
    let picked = draw_distinct_from_pdf(&weights, count, &avoid, rng)?;
    let points: Vec<Point> = picked.into_iter().map(|i| pool[i]).collect();
    set.append(&points)
}

/// R3: retain points with residual magnitude at or above the mean, resample
/// the rest uniformly. Size is preserved.
pub fn r3_update(
    set: &mut TrainingSet,
    residual_magnitudes: &[f64],
    rng: &mut ChaCha8Rng,
) -> Result<usize> {
    if residual_magnitudes.len() != set.len() {
        return Err(Error::Argument(format!(
            "residual vector length {} does not match set size {}",
            residual_magnitudes.len(),
            set.len()
        )));
    }
    let mean = residual_magnitudes.iter().map(|r| r.abs()).sum::<f64>()
        / residual_magnitudes.len() as f64;
    let mut kept: Vec<Point> = set
        .points()
        .iter()
        .zip(residual_magnitudes)
        .filter_map(|(p, r)| (r.abs() >= mean).then_some(*p))
        .collect();
    let retained = kept.len();
    while kept.len() < set.len() {
        let p = uniform_interior_point(rng);
        if !kept.iter().any(|q| q.x == p.x && q.t == p.t) {
            kept.push(p);
        }
    }
    set.replace(kept)?;
    Ok(retained)
}

// ---------------------------------------------------------------------------
// Sampler implementations driven by the training loop.
// ---------------------------------------------------------------------------

/// A set that never changes (uniform random or Hammersley).
pub struct FixedSampler {
    name: &'static str,
    set: TrainingSet,
}

impl FixedSampler {
    pub fn uniform(n: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let set = TrainingSet::new(uniform_points(n, rng)?, n)?;
        Ok(FixedSampler {
            name: "uniform",
            set,
        })
    }

    pub fn hammersley(n: usize) -> Result<Self> {
        let set = TrainingSet::new(hammersley_points(n)?, n)?;
        Ok(FixedSampler {
            name: "hammersley",
            set,
        })
    }
}

impl Sampler for FixedSampler {
    fn name(&self) -> &'static str {
        self.name
    }

    fn training_points(&self) -> &[Point] {
        self.set.points()
    }
}

/// Full uniform resample of the whole set every `interval` iterations.
pub struct RandomResampleSampler {
    set: TrainingSet,
    interval: u64,
}

impl RandomResampleSampler {
    pub fn new(n: usize, interval: u64, rng: &mut ChaCha8Rng) -> Result<Self> {
        Ok(RandomResampleSampler {
            set: TrainingSet::new(uniform_points(n, rng)?, n)?,
            interval,
        })
    }

    pub fn from_schedule(schedule: SamplerSchedule, rng: &mut ChaCha8Rng) -> Result<Self> {
        schedule.validate()?;
        Self::new(schedule.initial_points, schedule.interval, rng)
    }
}

impl Sampler for RandomResampleSampler {
    fn name(&self) -> &'static str {
        "random_resample"
    }

    fn training_points(&self) -> &[Point] {
        self.set.points()
    }

    fn update(
        &mut self,
        iteration: u64,
        _evaluator: &ResidualEval,
        rng: &mut ChaCha8Rng,
    ) -> Result<UpdateOutcome> {
        if iteration % self.interval != 0 {
            return Ok(UpdateOutcome::NotDue);
        }
        self.set.replace(uniform_points(self.set.len(), rng)?)?;
        Ok(UpdateOutcome::Ran { changed: true })
    }
}

/// Greedy residual refinement: grow the set by the top-residual pool points.
pub struct RarGSampler {
    set: TrainingSet,
    interval: u64,
    count: usize,
    pool_size: usize,
}

impl RarGSampler {
    pub fn new(
        initial: usize,
        interval: u64,
        count: usize,
        pool_size: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        Ok(RarGSampler {
            set: TrainingSet::new(uniform_points(initial, rng)?, initial)?,
            interval,
            count,
            pool_size,
        })
    }

    pub fn from_schedule(schedule: SamplerSchedule, rng: &mut ChaCha8Rng) -> Result<Self> {
        schedule.validate()?;
        Self::new(
            schedule.initial_points,
            schedule.interval,
            schedule.points_per_update,
            schedule.pool_size,
            rng,
        )
    }
}

impl Sampler for RarGSampler {
    fn name(&self) -> &'static str {
        "rar_g"
    }

    fn training_points(&self) -> &[Point] {
        self.set.points()
    }

    fn update(
        &mut self,
        iteration: u64,
        evaluator: &ResidualEval,
        rng: &mut ChaCha8Rng,
    ) -> Result<UpdateOutcome> {
        if iteration % self.interval != 0 {
            return Ok(UpdateOutcome::NotDue);
        }
        let pool = uniform_points(self.pool_size, rng)?;
        let residuals = evaluator(&pool)?;
        rar_g_update(
            &mut self.set,
            &pool,
            residuals.as_slice().expect("standard layout"),
            self.count,
        )?;
        Ok(UpdateOutcome::Ran { changed: true })
    }
}

/// Distribution-based growth: append points drawn from the residual PDF.
pub struct RarDSampler {
    set: TrainingSet,
    interval: u64,
    count: usize,
    pool_size: usize,
}

impl RarDSampler {
    pub fn new(
        initial: usize,
        interval: u64,
        count: usize,
        pool_size: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self> {
        Ok(RarDSampler {
            set: TrainingSet::new(uniform_points(initial, rng)?, initial)?,
            interval,
            count,
            pool_size,
        })
    }

    pub fn from_schedule(schedule: SamplerSchedule, rng: &mut ChaCha8Rng) -> Result<Self> {
        schedule.validate()?;
        Self::new(
            schedule.initial_points,
            schedule.interval,
            schedule.points_per_update,
            schedule.pool_size,
            rng,
        )
    }
}

impl Sampler for RarDSampler {
    fn name(&self) -> &'static str {
        "rar_d"
    }

    fn training_points(&self) -> &[Point] {
        self.set.points()
    }

    fn update(
        &mut self,
        iteration: u64,
        evaluator: &ResidualEval,
        rng: &mut ChaCha8Rng,
    ) -> Result<UpdateOutcome> {
        if iteration % self.interval != 0 {
            return Ok(UpdateOutcome::NotDue);
        }
        let pool = uniform_points(self.pool_size, rng)?;
        let residuals = evaluator(&pool)?;
        rar_d_update(
            &mut self.set,
            &pool,
            residuals.as_slice().expect("standard layout"),
            self.count,
            rng,
        )?;
        Ok(UpdateOutcome::Ran { changed: true })
    }
}

/// Release-and-resample from the residual PDF over a fresh pool.
pub struct RadSampler {
    set: TrainingSet,
    interval: u64,
    pool_size: usize,
}

impl RadSampler {
    pub fn new(n: usize, interval: u64, pool_size: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        Ok(RadSampler {
            set: TrainingSet::new(uniform_points(n, rng)?, n)?,
            interval,
            pool_size,
        })
    }
}

impl Sampler for RadSampler {
    fn name(&self) -> &'static str {
        "rad"
    }

    fn training_points(&self) -> &[Point] {
        self.set.points()
    }

    fn update(
        &mut self,
        iteration: u64,
        evaluator: &ResidualEval,
        rng: &mut ChaCha8Rng,
    ) -> Result<UpdateOutcome> {
        if iteration % self.interval != 0 {
            return Ok(UpdateOutcome::NotDue);
        }
        let pool = uniform_points(self.pool_size, rng)?;
        let residuals = evaluator(&pool)?;
        let fresh = rad_update(
            &pool,
            residuals.as_slice().expect("standard layout"),
            self.set.len(),
            rng,
        )?;
        self.set.replace(fresh)?;
        Ok(UpdateOutcome::Ran { changed: true })
    }
}

/// Retain-Resample-Release, applied every iteration using the residuals
/// already computed for the loss.
pub struct R3Sampler {
    set: TrainingSet,
    last_magnitudes: Vec<f64>,
}

impl R3Sampler {
    pub fn new(n: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        Ok(R3Sampler {
            set: TrainingSet::new(uniform_points(n, rng)?, n)?,
            last_magnitudes: Vec::new(),
        })
    }
}

impl Sampler for R3Sampler {
    fn name(&self) -> &'static str {
        "r3"
    }

    fn training_points(&self) -> &[Point] {
        self.set.points()
    }

    fn observe(
        &mut self,
        _iteration: u64,
        train_residuals: &[f64],
        _watch_residuals: Option<&[f64]>,
    ) -> Result<()> {
        self.last_magnitudes = train_residuals.iter().map(|r| r.abs()).collect();
        Ok(())
    }

    fn update(
        &mut self,
        _iteration: u64,
        _evaluator: &ResidualEval,
        rng: &mut ChaCha8Rng,
    ) -> Result<UpdateOutcome> {
        if self.last_magnitudes.len() != self.set.len() {
            return Err(Error::Logic(
                "r3 update before residuals were observed".into(),
            ));
        }
        let retained = r3_update(&mut self.set, &self.last_magnitudes, rng)?;
        Ok(UpdateOutcome::Ran {
            changed: retained < self.set.len(),
        })
    }
}
