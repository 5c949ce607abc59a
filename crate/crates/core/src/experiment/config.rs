//! Experiment configuration: a TOML file naming the problem, the sampler
//! and its parameters, and the training setup.

use std::path::PathBuf;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::{PdeKind, PdeProblem, ReactionSign};
use crate::sampler::{
    FixedSampler, QrDeimConfig, QrDeimRConfig, QrDeimRSampler, QrDeimSampler, R3Sampler,
    RadSampler, RandomResampleSampler, RarDSampler, RarGSampler, Sampler, SamplerSchedule,
};
use crate::train::TrainConfig;

fn default_repeats() -> usize {
    1
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

fn default_reference_dir() -> PathBuf {
    PathBuf::from("references")
}

fn default_hidden_layers() -> usize {
    5
}

fn default_hidden_width() -> usize {
    64
}

/// Network architecture section (input dimension comes from the problem).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    #[serde(default = "default_hidden_layers")]
    pub hidden_layers: usize,
    #[serde(default = "default_hidden_width")]
    pub hidden_width: usize,
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection {
            hidden_layers: default_hidden_layers(),
            hidden_width: default_hidden_width(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// wave | convection | allen_cahn | burgers
    pub pde: String,
    /// uniform | hammersley | random_resample | rar_g | rar_d | rad | r3 |
    /// qr_deim | qr_deim_r
    pub sampler: String,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_reference_dir")]
    pub reference_dir: PathBuf,
    /// Iterations at which to dump the training point set.
    #[serde(default)]
    pub dump_checkpoints: Vec<u64>,
    /// Reaction sign for Allen-Cahn runs.
    #[serde(default)]
    pub allen_cahn_reaction_sign: Option<ReactionSign>,
    #[serde(default)]
    pub network: NetworkSection,
    pub train: TrainConfig,
    /// Sampler-specific parameters, validated against the sampler's schema.
    #[serde(default)]
    pub sampler_options: toml::Table,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.problem()?;
        self.train.validate()?;
        if self.repeats < 1 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        // Surface sampler-option schema violations immediately.
        let mut probe = crate::train::stream_rng(0, crate::train::STREAM_SAMPLER_BUILD);
        build_sampler(&self.sampler, &self.sampler_options, &mut probe)?;
        Ok(())
    }

    pub fn problem(&self) -> Result<PdeProblem> {
        let kind = PdeKind::parse(&self.pde)?;
        Ok(match (kind, self.allen_cahn_reaction_sign) {
            (PdeKind::AllenCahn, Some(sign)) => PdeProblem::allen_cahn(sign),
            _ => PdeProblem::new(kind),
        })
    }

    /// Label used for output directories and report grouping.
    pub fn label(&self) -> String {
        format!("{}-{}", self.pde, self.sampler)
    }
}

fn parse_options<T: serde::de::DeserializeOwned>(name: &str, table: &toml::Table) -> Result<T> {
    T::deserialize(table.clone()).map_err(|e| {
        Error::Config(format!("invalid sampler_options for '{name}': {e}"))
    })
}

fn default_n_initial_full() -> usize {
    2000
}

fn default_n_initial_growing() -> usize {
    1000
}

fn default_interval() -> u64 {
    1000
}

fn default_points_per_update() -> usize {
    10
}

fn default_pool_size() -> usize {
    10_000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixedOptions {
    #[serde(default = "default_n_initial_full")]
    n_initial: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResampleOptions {
    #[serde(default = "default_n_initial_full")]
    n_initial: usize,
    #[serde(default = "default_interval")]
    interval: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GrowingOptions {
    #[serde(default = "default_n_initial_growing")]
    n_initial: usize,
    #[serde(default = "default_interval")]
    interval: u64,
    #[serde(default = "default_points_per_update")]
    points_per_update: usize,
    #[serde(default = "default_pool_size")]
    pool_size: usize,
}

impl GrowingOptions {
    fn schedule(&self) -> SamplerSchedule {
        SamplerSchedule {
            initial_points: self.n_initial,
            interval: self.interval,
            points_per_update: self.points_per_update,
            pool_size: self.pool_size,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadOptions {
    #[serde(default = "default_n_initial_full")]
    n_initial: usize,
    #[serde(default = "default_interval")]
    interval: u64,
    #[serde(default = "default_pool_size")]
    pool_size: usize,
}

fn default_n_snapshot() -> usize {
    1000
}

fn default_energy_threshold() -> f64 {
    0.005
}

fn default_target_rank() -> usize {
    100
}

fn default_oversample() -> usize {
    50
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QrDeimOptions {
    #[serde(default = "default_n_initial_full")]
    n_initial: usize,
    #[serde(default = "default_n_snapshot")]
    n_snapshot: usize,
    #[serde(default = "default_interval")]
    period: u64,
    #[serde(default = "default_energy_threshold")]
    energy_threshold: f64,
    #[serde(default)]
    energy_convention: crate::sampler::EnergyConvention,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QrDeimROptions {
    #[serde(default = "default_n_initial_full")]
    n_initial: usize,
    #[serde(default = "default_n_snapshot")]
    n_snapshot: usize,
    #[serde(default = "default_interval")]
    period: u64,
    #[serde(default = "default_target_rank")]
    target_rank: usize,
    #[serde(default = "default_oversample")]
    oversample: usize,
}

/// Construct a sampler from its name and option table, drawing any initial
/// point sets from `rng`.
pub fn build_sampler(
    name: &str,
    options: &toml::Table,
    rng: &mut ChaCha8Rng,
) -> Result<Box<dyn Sampler>> {
    Ok(match name {
        "uniform" => {
            let opt: FixedOptions = parse_options(name, options)?;
            Box::new(FixedSampler::uniform(opt.n_initial, rng)?)
        }
        "hammersley" => {
            let opt: FixedOptions = parse_options(name, options)?;
            Box::new(FixedSampler::hammersley(opt.n_initial)?)
        }
        "random_resample" => {
            let opt: ResampleOptions = parse_options(name, options)?;
            Box::new(RandomResampleSampler::new(opt.n_initial, opt.interval, rng)?)
        }
        "rar_g" => {
            let opt: GrowingOptions = parse_options(name, options)?;
            Box::new(RarGSampler::from_schedule(opt.schedule(), rng)?)
        }
        "rar_d" => {
            let opt: GrowingOptions = parse_options(name, options)?;
            Box::new(RarDSampler::from_schedule(opt.schedule(), rng)?)
        }
        "rad" => {
            let opt: RadOptions = parse_options(name, options)?;
            Box::new(RadSampler::new(opt.n_initial, opt.interval, opt.pool_size, rng)?)
        }
        "r3" => {
            let opt: FixedOptions = parse_options(name, options)?;
            Box::new(R3Sampler::new(opt.n_initial, rng)?)
        }
        "qr_deim" => {
            let opt: QrDeimOptions = parse_options(name, options)?;
            let config = QrDeimConfig {
                n_snapshot: opt.n_snapshot,
                period: opt.period,
                energy_threshold: opt.energy_threshold,
                energy_convention: opt.energy_convention,
            };
            Box::new(QrDeimSampler::new(config, opt.n_initial, rng)?)
        }
        "qr_deim_r" => {
            let opt: QrDeimROptions = parse_options(name, options)?;
            let config = QrDeimRConfig {
                n_snapshot: opt.n_snapshot,
                period: opt.period,
                target_rank: opt.target_rank,
                oversample: opt.oversample,
            };
            Box::new(QrDeimRSampler::new(config, opt.n_initial, rng)?)
        }
        other => {
            return Err(Error::Config(format!("unknown sampler '{other}'")));
        }
    })
}
