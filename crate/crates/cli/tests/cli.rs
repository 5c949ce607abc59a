//! End-to-end checks of the CLI surface: exit codes, output files, and the
//! machine-readable error line.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pinndeim"))
}

fn write_smoke_config(dir: &Path) -> std::path::PathBuf {
    let config = format!(
        r#"
pde = "wave"
sampler = "qr_deim"
repeats = 2
output_dir = "{out}"
reference_dir = "{refs}"

[network]
hidden_layers = 1
hidden_width = 6

[train]
max_iterations = 6
validation_size = 50
validation_interval = 3
seed = 21

[sampler_options]
n_initial = 40
n_snapshot = 25
period = 3
"#,
        out = dir.join("runs").display(),
        refs = dir.join("references").display(),
    );
    let path = dir.join("config.toml");
    fs::write(&path, config).unwrap();
    path
}

#[test]
fn run_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_smoke_config(dir.path());

    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8(output.stdout).unwrap();
    // One JSON line per repeat plus the aggregate.
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3, "stdout: {stdout}");
    for line in &lines {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(value.get("final_error").is_some() || value.get("mean").is_some());
    }

    // Exported metrics exist for both seeds.
    for seed in [21, 22] {
        let metrics = dir
            .path()
            .join(format!("runs/wave-qr_deim/seed{seed}/metrics.csv"));
        assert!(metrics.exists());
        let text = fs::read_to_string(&metrics).unwrap();
        assert_eq!(text.lines().count(), 7); // header + 6 iterations
    }

    // Aggregating the persisted summaries reproduces the run errors.
    let output = bin()
        .args(["report", "--in"])
        .arg(dir.path().join("runs"))
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(report["label"], "wave-qr_deim");
    assert_eq!(report["runs"], 2);
    assert!(dir.path().join("runs/report.csv").exists());
}

#[test]
fn seed_flag_runs_single_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_smoke_config(dir.path());
    let output = bin()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--seed", "77"])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(dir.path().join("runs/wave-qr_deim/seed77/summary.toml").exists());
    assert!(!dir.path().join("runs/wave-qr_deim/seed21").exists());
}

#[test]
fn reference_subcommand_builds_cache() {
    let dir = tempfile::tempdir().unwrap();
    let output = bin()
        .args(["reference", "--pde", "wave", "--nx", "32", "--nt", "8", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(value["problem"], "wave");
    assert!(dir.path().join("wave_32x8_v1.refgrid").exists());
}

#[test]
fn bad_config_exits_nonzero_with_error_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "pde = \"heat\"\nsampler = \"uniform\"\n[train]\nmax_iterations = 1\n").unwrap();
    let output = bin().args(["run", "--config"]).arg(&path).output().unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    let line = stderr.lines().last().unwrap();
    let value: serde_json::Value = serde_json::from_str(line).unwrap();
    assert!(value["error"].as_str().unwrap().contains("heat"));
}

#[test]
fn sweep_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_smoke_config(dir.path());
    // Shrink to one repeat for speed.
    let text = fs::read_to_string(&config).unwrap().replace("repeats = 2", "repeats = 1");
    fs::write(&config, text).unwrap();
    let grid_path = dir.path().join("grid.toml");
    fs::write(
        &grid_path,
        "parameter = \"energy_threshold\"\nvalues = [0.1, 0.005]\n",
    )
    .unwrap();
    let output = bin()
        .args(["sweep", "--config"])
        .arg(&config)
        .arg("--grid")
        .arg(&grid_path)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let table = dir.path().join("runs/sweep.csv");
    let text = fs::read_to_string(table).unwrap();
    assert_eq!(text.lines().count(), 3); // header + 2 cells
}
