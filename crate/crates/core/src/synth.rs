//! Small synthetic hyperspectral scene for tests and demos.
//!
//! Each class has a smooth prototype spectrum. A pixel is its class prototype
//! scaled by a random illumination factor plus Gaussian noise, clamped to
//! [0, 1]. Classes are laid out in square blocks so both image halves contain
//! every class, and a random subset of pixels is left unlabeled.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dataio::{encode_cube, CubeHeader, Interleave, PixelCoord, SpectraTable, ValueEncoding};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::seed::rng_from;

#[derive(Debug, Clone, PartialEq)]
pub struct MiniCubeConfig {
    pub height: usize,
    pub width: usize,
    pub bands: usize,
    pub classes: u16,
    /// Side of the square class blocks, in pixels.
    pub block: usize,
    pub noise_std: f64,
    /// Illumination factor is drawn from `1 ± illumination`.
    pub illumination: f64,
    pub unlabeled_fraction: f64,
    pub seed: u64,
}

impl Default for MiniCubeConfig {
    fn default() -> Self {
        Self {
            height: 32,
            width: 32,
            bands: 8,
            classes: 4,
            block: 8,
            noise_std: 0.08,
            illumination: 0.25,
            unlabeled_fraction: 0.25,
            seed: 2018,
        }
    }
}

/// Prototype spectrum of class `c` (1-based) at `bands` evenly spaced wavelengths.
pub fn prototype(c: u16, classes: u16, bands: usize) -> Vec<f64> {
    let phase = std::f64::consts::PI * (c - 1) as f64 / classes as f64;
    let level = 0.3 + 0.4 * (c - 1) as f64 / classes.max(2).saturating_sub(1) as f64;
    (0..bands)
        .map(|b| {
            let t = b as f64 / bands.max(2).saturating_sub(1) as f64;
            (level + 0.2 * (2.0 * std::f64::consts::PI * t + phase).sin()).clamp(0.05, 0.95)
        })
        .collect()
}

fn block_class(config: &MiniCubeConfig, row: usize, col: usize) -> u16 {
    let (br, bc) = (row / config.block, col / config.block);
    ((br + 2 * bc) % config.classes as usize) as u16 + 1
}

/// Generates the scene as a table with pixel coordinates and class names `class_<id>`.
pub fn mini_cube(config: &MiniCubeConfig) -> Result<SpectraTable> {
    if config.height == 0 || config.width == 0 || config.bands == 0 || config.classes == 0 || config.block == 0 {
        return Err(Error::Config(format!("degenerate mini-cube {config:?}")));
    }
    if !(0.0..1.0).contains(&config.unlabeled_fraction) || !(config.noise_std >= 0.0) {
        return Err(Error::Config(format!("invalid mini-cube noise or unlabeled fraction {config:?}")));
    }
    let mut rng = rng_from(config.seed);
    let noise = Normal::new(0.0, config.noise_std).map_err(|e| Error::Config(e.to_string()))?;
    let protos: Vec<Vec<f64>> = (1..=config.classes)
        .map(|c| prototype(c, config.classes, config.bands))
        .collect();
    let n = config.height * config.width;
    let mut values = Vec::with_capacity(n * config.bands);
    let mut labels = Vec::with_capacity(n);
    let mut coords: Vec<PixelCoord> = Vec::with_capacity(n);
    for row in 0..config.height {
        for col in 0..config.width {
            let class = block_class(config, row, col);
            let scale = 1.0 + rng.random_range(-config.illumination..=config.illumination);
            for &p in &protos[class as usize - 1] {
                values.push((scale * p + noise.sample(&mut rng)).clamp(0.0, 1.0));
            }
            let hidden = rng.random::<f64>() < config.unlabeled_fraction;
            labels.push(if hidden { 0 } else { class });
            coords.push((row as u32, col as u32));
        }
    }
    let names: BTreeMap<u16, String> = (1..=config.classes).map(|c| (c, format!("class_{c}"))).collect();
    SpectraTable::new(
        Matrix::from_vec(n, config.bands, values)?,
        labels,
        Some(coords),
        config.classes,
        names,
    )
}

/// The same scene as a raw `u16` band-sequential cube scaled by 10000,
/// returned as (header, payload, label map).
pub fn mini_cube_raw(config: &MiniCubeConfig) -> Result<(CubeHeader, Vec<u8>, Vec<u16>)> {
    let table = mini_cube(config)?;
    let header = CubeHeader {
        height: config.height,
        width: config.width,
        bands: config.bands,
        interleave: Interleave::BandSequential,
        encoding: ValueEncoding::U16Le,
        max_reflectance: Some(10_000.0),
    };
    let scaled: Vec<f64> = table.spectra().as_slice().iter().map(|v| v * 10_000.0).collect();
    let payload = encode_cube(&header, &scaled)?;
    Ok((header, payload, table.labels().to_vec()))
}
