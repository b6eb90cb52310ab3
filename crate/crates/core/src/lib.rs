//! Class-conditional Wasserstein GAN with gradient penalty for hyperspectral
//! pixel spectra, plus the tooling around it: cube ingestion and splits,
//! real-vs-fake analysis, and augmentation experiments.

mod binio;
pub mod analysis;
pub mod augment;
pub mod dataio;
pub mod error;
pub mod gan;
pub mod numerics;
pub mod seed;
pub mod synth;

pub use dataio::SpectraTable;
pub use gan::{GanCheckpoint, GanConfig};
pub use error::{Error, ErrorKind, Result};
pub use numerics::{Matrix, MlpGrads, MlpParams};
