//! Experiment harness: seeded runs, repeats, ablation sweeps, aggregation,
//! and file export.

mod aggregate;
mod config;
mod export;
mod run;
mod sweep;

pub use aggregate::{aggregate, AggregateReport};
pub use config::{build_sampler, ExperimentConfig, NetworkSection};
pub use export::{export_record, load_summary_error, load_summary_label, RunPaths};
pub use run::{evaluate_on_test_grid, run, run_repeats};
pub use sweep::{sweep, write_sweep_table, SweepCell, SweepGrid};
