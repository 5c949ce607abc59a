//! The training loop: full-batch residual loss, Adam with cosine annealing,
//! sampler hooks, and best-validation checkpointing.

use ndarray::Array1;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::TrainConfig;
use super::optimizer::{adam_step, cosine_lr, init_network, OptimizerState};
use crate::autodiff::{self, NetworkConfig, NetworkParams};
use crate::domain::Point;
use crate::error::{Error, Result};
use crate::pde::PdeProblem;
use crate::sampler::{uniform_points, Sampler, UpdateOutcome};

/// Independent deterministic generator streams derived from the run seed.
/// Stream 0 is reserved for sampler construction by the caller.
pub(crate) const STREAM_SAMPLER_BUILD: u64 = 0;
const STREAM_INIT: u64 = 1;
const STREAM_VALIDATION: u64 = 2;
const STREAM_SAMPLER_UPDATES: u64 = 3;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Everything one seeded training run produced.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub problem: String,
    pub sampler: String,
    pub network: NetworkConfig,
    pub config: TrainConfig,
    pub seed: u64,
    /// Loss at each iteration, evaluated with the pre-step parameters.
    pub train_loss: Vec<f64>,
    /// Learning rate applied at each iteration.
    pub learning_rates: Vec<f64>,
    /// `(iteration, validation loss)` at each validation check.
    pub validation: Vec<(u64, f64)>,
    /// Iteration and loss of the best validation check.
    pub best_validation: Option<(u64, f64)>,
    /// Parameters reported for evaluation (best checkpoint, or final when
    /// checkpointing is disabled).
    pub best_params: NetworkParams,
    pub final_params: NetworkParams,
    /// Training sets captured at the configured dump iterations.
    pub point_history: Vec<(u64, Vec<Point>)>,
    /// `(iteration, fraction of training points with t < 0.5)`, recorded at
    /// iteration 0 and whenever the sampler ran an update.
    pub temporal_bias: Vec<(u64, f64)>,
    /// Per-update diagnostics from QR-DEIM samplers (empty otherwise).
    pub sampler_updates: Vec<crate::sampler::UpdateDiagnostics>,
    /// Iteration at which training aborted on a non-finite loss, if any.
    pub failure_iteration: Option<u64>,
    /// Relative l2 error on the test grid; filled by the harness.
    pub final_error: Option<f64>,
}

impl RunRecord {
    pub fn failed(&self) -> bool {
        self.failure_iteration.is_some()
    }
}

fn early_time_fraction(points: &[Point]) -> f64 {
    points.iter().filter(|p| p.t < 0.5).count() as f64 / points.len() as f64
}

/// Mean squared residual over a fixed point set.
fn residual_loss(problem: &PdeProblem, params: &NetworkParams, points: &[Point]) -> Result<f64> {
    let r = problem.residual(params, points)?;
    Ok(r.iter().map(|v| v * v).sum::<f64>() / points.len() as f64)
}

/// Run `config.max_iterations` of full-batch Adam on the sampler's training
/// set, invoking the sampler's observation and update hooks each iteration
/// and checkpointing on the best validation loss.
pub fn train(
    problem: &PdeProblem,
    network: &NetworkConfig,
    sampler: &mut dyn Sampler,
    config: &TrainConfig,
) -> Result<RunRecord> {
    config.validate()?;
    network.validate()?;
    if network.input_dim != problem.input_dim() {
        return Err(Error::Config(format!(
            "network input_dim {} does not match problem '{}' (needs {})",
            network.input_dim,
            problem.name(),
            problem.input_dim()
        )));
    }

    let transform = problem.transform();
    let mut params = init_network(network, &mut stream_rng(config.seed, STREAM_INIT))?;
    let mut flat = params.to_flat();
    let mut optimizer = OptimizerState::new(flat.len());
    let mut sampler_rng = stream_rng(config.seed, STREAM_SAMPLER_UPDATES);

    // The validation set is drawn once and never mutated.
    let validation_points = uniform_points(
        config.validation_size,
        &mut stream_rng(config.seed, STREAM_VALIDATION),
    )?;

    let mut record = RunRecord {
        problem: problem.cache_key(),
        sampler: sampler.name().to_string(),
        network: *network,
        config: config.clone(),
        seed: config.seed,
        train_loss: Vec::with_capacity(config.max_iterations as usize),
        learning_rates: Vec::with_capacity(config.max_iterations as usize),
        validation: Vec::new(),
        best_validation: None,
        best_params: params.clone(),
        final_params: params.clone(),
        point_history: Vec::new(),
        temporal_bias: vec![(0, early_time_fraction(sampler.training_points()))],
        sampler_updates: Vec::new(),
        failure_iteration: None,
        final_error: None,
    };
    if config.dump_checkpoints.contains(&0) {
        record
            .point_history
            .push((0, sampler.training_points().to_vec()));
    }

    let mut best_checkpoint: Option<NetworkParams> = None;
    for iteration in 1..=config.max_iterations {
        let points: Vec<Point> = sampler.training_points().to_vec();
        let rate = cosine_lr(iteration - 1, config.max_iterations, config.base_lr)?;
        let objective = problem.residual_objective(points.len());

        let (loss, grad, bundle) = match autodiff::parameter_gradient_with_bundle(
            &params,
            &points,
            &transform,
            &objective,
        ) {
            Ok(out) => out,
            Err(Error::Numerical(msg)) => {
                log::error!("aborting at iteration {iteration}: {msg}");
                record.failure_iteration = Some(iteration);
                break;
            }
            Err(other) => return Err(other),
        };
        if !loss.is_finite() {
            record.failure_iteration = Some(iteration);
            break;
        }
        record.train_loss.push(loss);
        record.learning_rates.push(rate);
        let residuals = objective.residuals(&bundle);

        if adam_step(
            &mut optimizer,
            &mut flat,
            &grad,
            rate,
            config.adam_beta1,
            config.adam_beta2,
            config.adam_eps,
        )
        .is_err()
        {
            record.failure_iteration = Some(iteration);
            break;
        }
        params.assign_from_flat(&flat)?;

        // Observation hook: loss-pass residuals plus, if the sampler watches
        // extra points, residuals there under the updated parameters.
        let watch_residuals: Option<Array1<f64>> = match sampler.watch_points() {
            Some(watch) => {
                let watch: Vec<Point> = watch.to_vec();
                match problem.residual(&params, &watch) {
                    Ok(r) => Some(r),
                    Err(Error::Numerical(msg)) => {
                        log::error!("aborting at iteration {iteration}: {msg}");
                        record.failure_iteration = Some(iteration);
                        break;
                    }
                    Err(other) => return Err(other),
                }
            }
            None => None,
        };
        sampler.observe(
            iteration,
            residuals.as_slice().expect("standard layout"),
            watch_residuals.as_ref().map(|r| r.as_slice().unwrap()),
        )?;

        let evaluator = |pts: &[Point]| problem.residual(&params, pts);
        if let UpdateOutcome::Ran { .. } = sampler.update(iteration, &evaluator, &mut sampler_rng)? {
            record
                .temporal_bias
                .push((iteration, early_time_fraction(sampler.training_points())));
        }
        if config.dump_checkpoints.contains(&iteration) {
            record
                .point_history
                .push((iteration, sampler.training_points().to_vec()));
        }

        if iteration % config.validation_interval == 0 || iteration == config.max_iterations {
            let val_loss = match residual_loss(problem, &params, &validation_points) {
                Ok(v) => v,
                Err(Error::Numerical(msg)) => {
                    log::error!("aborting at iteration {iteration}: {msg}");
                    record.failure_iteration = Some(iteration);
                    break;
                }
                Err(other) => return Err(other),
            };
            record.validation.push((iteration, val_loss));
            if record.best_validation.is_none_or(|(_, best)| val_loss < best) {
                record.best_validation = Some((iteration, val_loss));
                best_checkpoint = Some(params.clone());
            }
        }
    }

    record.sampler_updates = sampler.update_diagnostics().to_vec();
    record.final_params = params.clone();
    record.best_params = match (config.checkpoint_on_best_val, best_checkpoint) {
        (true, Some(best)) => best,
        _ => params,
    };
    Ok(record)
}
