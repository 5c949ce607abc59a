//! Ablation sweeps over sampler hyperparameters.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use super::aggregate::{aggregate, AggregateReport};
use super::config::ExperimentConfig;
use super::run::run;
use crate::error::{Error, Result};

/// Which hyperparameter axis a sweep walks.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepGrid {
    /// Full QR-DEIM energy threshold values.
    EnergyThreshold(Vec<f64>),
    /// Randomized QR-DEIM target ranks.
    TargetRank(Vec<usize>),
    /// Cartesian grid over snapshot count and period.
    Snapshot {
        n_snapshot: Vec<usize>,
        period: Vec<u64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    parameter: String,
    #[serde(default)]
    values: Vec<toml::Value>,
    #[serde(default)]
    n_snapshot: Vec<usize>,
    #[serde(default)]
    period: Vec<u64>,
}

impl SweepGrid {
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: GridFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("bad grid: {e}")))?;
        match file.parameter.as_str() {
            "energy_threshold" => {
                let values = file
                    .values
                    .iter()
                    .map(|v| {
                        v.as_float()
                            .ok_or_else(|| Error::Config("energy values must be floats".into()))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                if values.is_empty() {
                    return Err(Error::Config("empty grid".into()));
                }
                Ok(SweepGrid::EnergyThreshold(values))
            }
            "target_rank" => {
                let values = file
                    .values
                    .iter()
                    .map(|v| {
                        v.as_integer()
                            .filter(|&k| k > 0)
                            .map(|k| k as usize)
                            .ok_or_else(|| Error::Config("ranks must be positive integers".into()))
                    })
                    .collect::<Result<Vec<usize>>>()?;
                if values.is_empty() {
                    return Err(Error::Config("empty grid".into()));
                }
                Ok(SweepGrid::TargetRank(values))
            }
            "snapshot" => {
                if file.n_snapshot.is_empty() || file.period.is_empty() {
                    return Err(Error::Config(
                        "snapshot grid needs n_snapshot and period lists".into(),
                    ));
                }
                Ok(SweepGrid::Snapshot {
                    n_snapshot: file.n_snapshot,
                    period: file.period,
                })
            }
            other => Err(Error::Config(format!("unknown sweep parameter '{other}'"))),
        }
    }

    /// Labels and option overrides for each grid cell.
    fn cells(&self) -> Vec<(String, Vec<(&'static str, toml::Value)>)> {
        match self {
            SweepGrid::EnergyThreshold(values) => values
                .iter()
                .map(|&e| {
                    (
                        format!("energy_threshold={e}"),
                        vec![("energy_threshold", toml::Value::Float(e))],
                    )
                })
                .collect(),
            SweepGrid::TargetRank(values) => values
                .iter()
                .map(|&k| {
                    (
                        format!("target_rank={k}"),
                        vec![("target_rank", toml::Value::Integer(k as i64))],
                    )
                })
                .collect(),
            SweepGrid::Snapshot { n_snapshot, period } => {
                let mut cells = Vec::new();
                for &n in n_snapshot {
                    for &p in period {
                        cells.push((
                            format!("n_snapshot={n},period={p}"),
                            vec![
                                ("n_snapshot", toml::Value::Integer(n as i64)),
                                ("period", toml::Value::Integer(p as i64)),
                            ],
                        ));
                    }
                }
                cells
            }
        }
    }
}

/// One sweep cell: the overridden parameters and the aggregate over repeats,
/// or the error that stopped the cell.
#[derive(Debug)]
pub struct SweepCell {
    pub label: String,
    pub report: Result<AggregateReport>,
}

/// Run every cell of the grid over the base configuration's repeats.
/// Per-cell failures are recorded, not propagated.
pub fn sweep(base: &ExperimentConfig, grid: &SweepGrid) -> Result<Vec<SweepCell>> {
    base.validate()?;
    let cells = grid.cells();
    let mut results = Vec::with_capacity(cells.len());
    for (label, overrides) in cells {
        let mut config = base.clone();
        for (key, value) in overrides {
            config.sampler_options.insert(key.to_string(), value);
        }
        config.output_dir = base.output_dir.join(sanitize(&label));
        let report = run_cell(&config, &label);
        results.push(SweepCell { label, report });
    }
    Ok(results)
}

fn run_cell(config: &ExperimentConfig, label: &str) -> Result<AggregateReport> {
    config.validate()?;
    let base_seed = config.train.seed;
    let mut errors = Vec::with_capacity(config.repeats);
    for r in 0..config.repeats as u64 {
        let record = run(config, base_seed + r)?;
        match record.final_error {
            Some(e) => errors.push(e),
            None => {
                return Err(Error::Numerical(format!(
                    "run seed {} of cell '{label}' aborted at iteration {:?}",
                    base_seed + r,
                    record.failure_iteration
                )))
            }
        }
    }
    aggregate(label, &errors)
}

/// Write the sweep results as a table mirroring the grid layout.
pub fn write_sweep_table(cells: &[SweepCell], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = fs::File::create(path)?;
    writeln!(w, "cell,mean,std,runs,errors")?;
    for cell in cells {
        match &cell.report {
            Ok(report) => {
                let errors = report
                    .errors
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(";");
                writeln!(
                    w,
                    "{},{},{},{},{errors}",
                    cell.label,
                    report.mean,
                    report.std,
                    report.errors.len()
                )?;
            }
            Err(e) => writeln!(w, "{},failed,,,{e}", cell.label)?,
        }
    }
    Ok(())
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}
