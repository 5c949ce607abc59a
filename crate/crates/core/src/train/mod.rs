//! Network initialization, Adam with cosine annealing, and the training
//! loop that drives a sampler.

mod config;
mod optimizer;
mod run;

pub use config::TrainConfig;
pub use optimizer::{adam_step, cosine_lr, init_network, OptimizerState};
pub use run::{train, RunRecord};

pub(crate) use run::{stream_rng, STREAM_SAMPLER_BUILD};
