//! Training-loop configuration.

use crate::error::{Error, Result};

fn default_base_lr() -> f64 {
    0.001
}

fn default_validation_size() -> usize {
    10_000
}

fn default_validation_interval() -> u64 {
    1_000
}

fn default_beta1() -> f64 {
    0.9
}

fn default_beta2() -> f64 {
    0.999
}

fn default_eps() -> f64 {
    1e-8
}

fn default_checkpoint() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub max_iterations: u64,
    #[serde(default = "default_base_lr")]
    pub base_lr: f64,
    #[serde(default = "default_validation_size")]
    pub validation_size: usize,
    #[serde(default = "default_validation_interval")]
    pub validation_interval: u64,
    #[serde(default = "default_beta1")]
    pub adam_beta1: f64,
    #[serde(default = "default_beta2")]
    pub adam_beta2: f64,
    #[serde(default = "default_eps")]
    pub adam_eps: f64,
    /// Keep the parameters with the lowest validation loss; otherwise the
    /// final parameters are reported.
    #[serde(default = "default_checkpoint")]
    pub checkpoint_on_best_val: bool,
    #[serde(default)]
    pub seed: u64,
    /// Iterations at which the training point set is recorded (0 means the
    /// initial set).
    #[serde(default)]
    pub dump_checkpoints: Vec<u64>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_iterations: 100_000,
            base_lr: default_base_lr(),
            validation_size: default_validation_size(),
            validation_interval: default_validation_interval(),
            adam_beta1: default_beta1(),
            adam_beta2: default_beta2(),
            adam_eps: default_eps(),
            checkpoint_on_best_val: default_checkpoint(),
            seed: 0,
            dump_checkpoints: Vec::new(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::Config("max_iterations must be >= 1".into()));
        }
        if !(self.base_lr > 0.0) {
            return Err(Error::Config("base_lr must be positive".into()));
        }
        for (name, beta) in [("beta1", self.adam_beta1), ("beta2", self.adam_beta2)] {
            if !(beta > 0.0 && beta < 1.0) {
                return Err(Error::Config(format!("adam {name} must lie in (0, 1)")));
            }
        }
        if self.validation_size == 0 || self.validation_interval == 0 {
            return Err(Error::Config("validation size and interval must be positive".into()));
        }
        Ok(())
    }
}
