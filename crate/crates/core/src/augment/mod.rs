//! Classifier experiments with and without generated training rows.

mod classifier;
mod config;
mod experiment;
mod synthesize;

pub use classifier::{overall_accuracy, per_class_accuracy, predict_classes, train_nn1d, Nn1dModel};
pub use config::{AugmentConfig, AugmentStrategy};
pub use experiment::{
    reports_csv, reports_json, run_experiment, run_ratio_sweep, run_strategies, EvalReport, ExperimentSeeds, REPORT_CSV_HEADER,
};
pub use synthesize::{augment_table, fake_count, proportional_counts};
