//! Experiment runner CLI.
//!
//! Subcommands: `run` a configured experiment, `sweep` a hyperparameter
//! grid, `reference` to prebuild reference grids, and `report` to aggregate
//! persisted runs. Exits 0 on success; on failure prints one JSON error
//! line to stderr and exits 1.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use walkdir::WalkDir;

use pinndeim::error::{Error, Result};
use pinndeim::experiment::{
    aggregate, load_summary_error, run, run_repeats, sweep, ExperimentConfig, SweepGrid,
};
use pinndeim::pde::reference::reference_solution_cached;
use pinndeim::pde::{GridSpec, PdeKind, PdeProblem, ReactionSign};

#[derive(Parser)]
#[command(name = "pinndeim", about = "PINN adaptive collocation experiments", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment (all repeats, or one seed).
    Run {
        /// Experiment configuration (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Run only this seed instead of the configured repeats.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an ablation sweep over a hyperparameter grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Grid specification (TOML).
        #[arg(long)]
        grid: PathBuf,
        /// Override the configured output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and cache a reference solution grid.
    Reference {
        /// wave | convection | allen_cahn | burgers
        #[arg(long)]
        pde: String,
        /// Cache directory.
        #[arg(long, default_value = "references")]
        out: PathBuf,
        /// Allen-Cahn reaction sign: as_printed | conventional.
        #[arg(long)]
        sign: Option<String>,
        #[arg(long, default_value_t = 256)]
        nx: usize,
        #[arg(long, default_value_t = 100)]
        nt: usize,
    },
    /// Aggregate persisted run summaries into a report.
    Report {
        /// Directory tree containing run outputs.
        #[arg(long = "in")]
        input: PathBuf,
        /// Report file (CSV); defaults to `<in>/report.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli.command) {
        eprintln!("{}", serde_json::json!({ "error": e.to_string() }));
        std::process::exit(1);
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config, seed, out } => {
            let mut config = load_config(&config)?;
            if let Some(dir) = out {
                config.output_dir = dir;
            }
            let records = match seed {
                Some(seed) => vec![run(&config, seed)?],
                None => run_repeats(&config)?,
            };
            for record in &records {
                match (record.final_error, record.failure_iteration) {
                    (Some(error), _) => println!(
                        "{}",
                        serde_json::json!({
                            "label": config.label(),
                            "seed": record.seed,
                            "final_error": error,
                            "best_val_iteration": record.best_validation.map(|(i, _)| i),
                        })
                    ),
                    (None, Some(iteration)) => println!(
                        "{}",
                        serde_json::json!({
                            "label": config.label(),
                            "seed": record.seed,
                            "failed_at_iteration": iteration,
                        })
                    ),
                    (None, None) => {}
                }
            }
            let errors: Vec<f64> = records.iter().filter_map(|r| r.final_error).collect();
            if errors.len() > 1 {
                let report = aggregate(config.label(), &errors)?;
                println!(
                    "{}",
                    serde_json::json!({
                        "label": report.label,
                        "runs": report.errors.len(),
                        "mean": report.mean,
                        "std": report.std,
                    })
                );
            }
            Ok(())
        }
        Command::Sweep { config, grid, out } => {
            let mut config = load_config(&config)?;
            if let Some(dir) = out {
                config.output_dir = dir;
            }
            let grid_text = fs::read_to_string(&grid)?;
            let grid = SweepGrid::from_toml(&grid_text)?;
            let cells = sweep(&config, &grid)?;
            let table = config.output_dir.join("sweep.csv");
            pinndeim::experiment::write_sweep_table(&cells, &table)?;
            for cell in &cells {
                match &cell.report {
                    Ok(report) => println!(
                        "{}",
                        serde_json::json!({
                            "cell": cell.label,
                            "mean": report.mean,
                            "std": report.std,
                            "runs": report.errors.len(),
                        })
                    ),
                    Err(e) => println!(
                        "{}",
                        serde_json::json!({ "cell": cell.label, "failed": e.to_string() })
                    ),
                }
            }
            println!(
                "{}",
                serde_json::json!({ "sweep_table": table.display().to_string() })
            );
            Ok(())
        }
        Command::Reference { pde, out, sign, nx, nt } => {
            let kind = PdeKind::parse(&pde)?;
            let problem = match (kind, sign.as_deref()) {
                (PdeKind::AllenCahn, Some("conventional")) => {
                    PdeProblem::allen_cahn(ReactionSign::Conventional)
                }
                (PdeKind::AllenCahn, Some("as_printed") | None) => {
                    PdeProblem::allen_cahn(ReactionSign::AsPrinted)
                }
                (_, Some(s)) if kind != PdeKind::AllenCahn => {
                    return Err(Error::Config(format!(
                        "--sign {s} only applies to allen_cahn"
                    )))
                }
                (_, Some(s)) => {
                    return Err(Error::Config(format!("unknown reaction sign '{s}'")))
                }
                _ => PdeProblem::new(kind),
            };
            let spec = GridSpec { nx, nt };
            let grid = reference_solution_cached(&problem, spec, &out)?;
            println!(
                "{}",
                serde_json::json!({
                    "problem": problem.cache_key(),
                    "nx": grid.spec.nx,
                    "nt": grid.spec.nt,
                    "solver": grid.solver,
                    "dir": out.display().to_string(),
                })
            );
            Ok(())
        }
        Command::Report { input, out } => {
            let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for entry in WalkDir::new(&input).into_iter().filter_map(|e| e.ok()) {
                if entry.file_name() == "summary.toml" {
                    let label = pinndeim::experiment::load_summary_label(entry.path())?;
                    if let Some(error) = load_summary_error(entry.path())? {
                        groups.entry(label).or_default().push(error);
                    }
                }
            }
            if groups.is_empty() {
                return Err(Error::Argument(format!(
                    "no completed run summaries under {}",
                    input.display()
                )));
            }
            let out = out.unwrap_or_else(|| input.join("report.csv"));
            if let Some(parent) = out.parent() {
                fs::create_dir_all(parent)?;
            }
            let mut lines = vec!["label,runs,mean,std".to_string()];
            for (label, errors) in &groups {
                let report = aggregate(label.clone(), errors)?;
                println!(
                    "{}",
                    serde_json::json!({
                        "label": report.label,
                        "runs": report.errors.len(),
                        "mean": report.mean,
                        "std": report.std,
                        "single_sample": report.single_sample,
                    })
                );
                lines.push(format!(
                    "{label},{},{},{}",
                    report.errors.len(),
                    report.mean,
                    report.std
                ));
            }
            fs::write(&out, lines.join("\n") + "\n")?;
            Ok(())
        }
    }
}

fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_toml(&text)
}
