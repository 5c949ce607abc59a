//! Seeded experiment execution.

use ndarray::Array1;

use super::config::{build_sampler, ExperimentConfig};
use super::export::{export_record, RunPaths};
use crate::autodiff::{NetworkConfig, NetworkParams};
use crate::error::Result;
use crate::pde::reference::reference_solution_cached;
use crate::pde::{relative_l2, GridSpec, PdeProblem, ReferenceGrid};
use crate::train::{stream_rng, train, RunRecord, STREAM_SAMPLER_BUILD};

/// Transformed network output on the test grid.
pub fn evaluate_on_test_grid(
    problem: &PdeProblem,
    params: &NetworkParams,
    spec: GridSpec,
) -> Result<Array1<f64>> {
    problem.transformed_output(params, &spec.points())
}

/// Execute one seeded run: train, measure the relative l2 error of the
/// checkpointed parameters on the 256x100 test grid, and persist the record
/// under `output_dir/<label>/seed<seed>/`.
pub fn run(config: &ExperimentConfig, seed: u64) -> Result<RunRecord> {
    config.validate()?;
    let problem = config.problem()?;
    let spec = GridSpec::default();
    let reference: ReferenceGrid =
        reference_solution_cached(&problem, spec, &config.reference_dir)?;

    let mut sampler = build_sampler(
        &config.sampler,
        &config.sampler_options,
        &mut stream_rng(seed, STREAM_SAMPLER_BUILD),
    )?;
    let network = NetworkConfig::new(
        problem.input_dim(),
        config.network.hidden_layers,
        config.network.hidden_width,
    );
    let mut train_config = config.train.clone();
    train_config.seed = seed;
    train_config.dump_checkpoints = config.dump_checkpoints.clone();

    let mut record = train(&problem, &network, sampler.as_mut(), &train_config)?;
    if !record.failed() {
        let pred = evaluate_on_test_grid(&problem, &record.best_params, spec)?;
        record.final_error = Some(relative_l2(
            pred.as_slice().expect("standard layout"),
            reference.flat(),
        )?);
    }

    let paths = RunPaths::new(
        config
            .output_dir
            .join(config.label())
            .join(format!("seed{seed}")),
    );
    export_record(&record, &paths)?;
    Ok(record)
}

/// Run `config.repeats` seeds, `base_seed + r` for the r-th repeat.
pub fn run_repeats(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let base = config.train.seed;
    (0..config.repeats as u64)
        .map(|r| run(config, base + r))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smoke_config(dir: &std::path::Path) -> ExperimentConfig {
        let text = format!(
            r#"
pde = "wave"
sampler = "uniform"
output_dir = "{out}"
reference_dir = "{refs}"

[network]
hidden_layers = 2
hidden_width = 8

[train]
max_iterations = 10
validation_size = 100
validation_interval = 5
seed = 3

[sampler_options]
n_initial = 50
"#,
            out = dir.join("runs").display(),
            refs = dir.join("references").display(),
        );
        ExperimentConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn smoke_run_produces_finite_error_and_files() {
        let dir = tempfile::tempdir().unwrap();
        let config = smoke_config(dir.path());
        let record = run(&config, 3).unwrap();
        assert_eq!(record.train_loss.len(), 10);
        let error = record.final_error.unwrap();
        assert!(error.is_finite() && error > 0.0);

        let paths = RunPaths::new(dir.path().join("runs/wave-uniform/seed3"));
        assert!(paths.metrics().exists());
        assert!(paths.summary().exists());
        let loaded = super::super::export::load_summary_error(&paths.summary())
            .unwrap()
            .unwrap();
        assert_eq!(loaded.to_bits(), error.to_bits());
    }

    #[test]
    fn same_seed_twice_is_identical_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let config = smoke_config(dir.path());
        let a = run(&config, 3).unwrap();
        let metrics_a =
            std::fs::read(dir.path().join("runs/wave-uniform/seed3/metrics.csv")).unwrap();
        let b = run(&config, 3).unwrap();
        let metrics_b =
            std::fs::read(dir.path().join("runs/wave-uniform/seed3/metrics.csv")).unwrap();
        assert_eq!(a.final_error.unwrap().to_bits(), b.final_error.unwrap().to_bits());
        assert_eq!(metrics_a, metrics_b);
    }
}
