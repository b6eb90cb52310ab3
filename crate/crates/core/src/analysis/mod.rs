//! Real-versus-fake plausibility checks: per-class spectral statistics, a
//! shared two-component PCA, linear-SVM separation accuracies and plot export.

pub mod export;
mod pca;
mod separation;
mod stats;
mod svm;

pub use pca::{fit_pca2, project, Pca2Projection};
pub use separation::{separation_table, SeparationGrid};
pub use stats::{class_stats, ClassStats};
pub use svm::{svm_accuracy, svm_train, Hyperplane, LinearSvmModel, SvmConfig};
