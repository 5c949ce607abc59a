//! File export for run records.
//!
//! Floating-point columns are written with Rust's shortest-round-trip
//! formatting, so re-parsing reproduces the in-memory values bit for bit.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::train::RunRecord;

/// File layout of one exported run.
#[derive(Debug, Clone)]
pub struct RunPaths {
    pub dir: PathBuf,
}

impl RunPaths {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        RunPaths { dir: dir.into() }
    }

    pub fn metrics(&self) -> PathBuf {
        self.dir.join("metrics.csv")
    }

    pub fn summary(&self) -> PathBuf {
        self.dir.join("summary.toml")
    }

    pub fn temporal_bias(&self) -> PathBuf {
        self.dir.join("temporal_bias.csv")
    }

    pub fn points(&self, iteration: u64) -> PathBuf {
        self.dir.join(format!("points_iter{iteration}.csv"))
    }

    pub fn sampler_updates(&self) -> PathBuf {
        self.dir.join("sampler_updates.jsonl")
    }

    pub fn best_params(&self) -> PathBuf {
        self.dir.join("best_params.f64le")
    }
}

#[derive(Debug, serde::Serialize, serde::Deserialize)]
struct Summary {
    problem: String,
    sampler: String,
    seed: u64,
    hidden_layers: usize,
    hidden_width: usize,
    max_iterations: u64,
    base_lr: f64,
    validation_size: usize,
    validation_interval: u64,
    adam_beta1: f64,
    adam_beta2: f64,
    adam_eps: f64,
    checkpoint_on_best_val: bool,
    iterations_recorded: usize,
    best_val_iteration: Option<u64>,
    best_val_loss: Option<f64>,
    failure_iteration: Option<u64>,
    /// Hex-encoded f64 bits alongside the decimal value, so the summary
    /// itself round-trips exactly.
    final_error: Option<f64>,
    final_error_bits: Option<String>,
}

/// Write metrics, summary, point dumps, the temporal-bias series, sampler
/// diagnostics, and the checkpointed parameters under `paths.dir`.
///
/// The summary is written last so a directory containing one is complete.
pub fn export_record(record: &RunRecord, paths: &RunPaths) -> Result<()> {
    fs::create_dir_all(&paths.dir)?;

    // (a) per-iteration metrics; validation losses appear on their check
    // iterations and the column is empty elsewhere.
    {
        let mut w = BufWriter::new(fs::File::create(paths.metrics())?);
        writeln!(w, "iteration,train_loss,val_loss,lr")?;
        let mut val_iter = record.validation.iter().peekable();
        for (i, (loss, lr)) in record
            .train_loss
            .iter()
            .zip(&record.learning_rates)
            .enumerate()
        {
            let iteration = (i + 1) as u64;
            let val = match val_iter.peek() {
                Some(&&(it, v)) if it == iteration => {
                    val_iter.next();
                    format!("{v}")
                }
                _ => String::new(),
            };
            writeln!(w, "{iteration},{loss},{val},{lr}")?;
        }
    }

    // (c) point dumps at configured checkpoints.
    for (iteration, points) in &record.point_history {
        let mut w = BufWriter::new(fs::File::create(paths.points(*iteration))?);
        writeln!(w, "iteration,x,t")?;
        for p in points {
            writeln!(w, "{iteration},{},{}", p.x, p.t)?;
        }
    }

    // (d) temporal-bias series.
    {
        let mut w = BufWriter::new(fs::File::create(paths.temporal_bias())?);
        writeln!(w, "iteration,fraction_t_below_half")?;
        for (iteration, fraction) in &record.temporal_bias {
            writeln!(w, "{iteration},{fraction}")?;
        }
    }

    // QR-DEIM update diagnostics, one JSON record per update.
    if !record.sampler_updates.is_empty() {
        let mut w = BufWriter::new(fs::File::create(paths.sampler_updates())?);
        for update in &record.sampler_updates {
            let line = serde_json::to_string(update)
                .map_err(|e| Error::Format(format!("diagnostics encoding: {e}")))?;
            writeln!(w, "{line}")?;
        }
    }

    // Checkpointed parameters, flat little-endian f64.
    {
        let mut w = BufWriter::new(fs::File::create(paths.best_params())?);
        for v in record.best_params.to_flat().iter() {
            w.write_all(&v.to_le_bytes())?;
        }
    }

    // (b) structured summary, written last.
    let summary = Summary {
        problem: record.problem.clone(),
        sampler: record.sampler.clone(),
        seed: record.seed,
        hidden_layers: record.network.hidden_layers,
        hidden_width: record.network.hidden_width,
        max_iterations: record.config.max_iterations,
        base_lr: record.config.base_lr,
        validation_size: record.config.validation_size,
        validation_interval: record.config.validation_interval,
        adam_beta1: record.config.adam_beta1,
        adam_beta2: record.config.adam_beta2,
        adam_eps: record.config.adam_eps,
        checkpoint_on_best_val: record.config.checkpoint_on_best_val,
        iterations_recorded: record.train_loss.len(),
        best_val_iteration: record.best_validation.map(|(i, _)| i),
        best_val_loss: record.best_validation.map(|(_, v)| v),
        failure_iteration: record.failure_iteration,
        final_error: record.final_error,
        final_error_bits: record.final_error.map(|e| format!("{:016x}", e.to_bits())),
    };
    let text = toml::to_string_pretty(&summary)
        .map_err(|e| Error::Format(format!("summary encoding: {e}")))?;
    fs::write(paths.summary(), text)?;
    Ok(())
}

/// Final error recorded in a run summary, reconstructed bit-exactly.
pub fn load_summary_error(path: &Path) -> Result<Option<f64>> {
    let text = fs::read_to_string(path)?;
    let summary: Summary =
        toml::from_str(&text).map_err(|e| Error::Format(format!("bad summary: {e}")))?;
    match summary.final_error_bits {
        Some(bits) => {
            let raw = u64::from_str_radix(&bits, 16)
                .map_err(|e| Error::Format(format!("bad error bits: {e}")))?;
            Ok(Some(f64::from_bits(raw)))
        }
        None => Ok(summary.final_error),
    }
}

/// Group label recorded in a run summary.
pub fn load_summary_label(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path)?;
    let summary: Summary =
        toml::from_str(&text).map_err(|e| Error::Format(format!("bad summary: {e}")))?;
    Ok(format!("{}-{}", summary.problem, summary.sampler))
}
