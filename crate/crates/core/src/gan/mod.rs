//! Conditional WGAN-GP: generator, critic and auxiliary classifier, their
//! update steps, the training schedule, sampling and latent interpolation.

mod checkpoint;
mod config;
mod sampling;
mod steps;
mod train;

pub use checkpoint::{init_networks, GanCheckpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use config::{GanConfig, TrainingMode};
pub use sampling::interpolation_alphas;
pub use steps::{one_hot, sample_latent, CriticStats, GeneratorStats, LatentBatch};
pub use train::{train, train_with, write_loss_log, BatchAudit, LossRecord, TrainOutcome, LOSS_LOG_HEADER};
