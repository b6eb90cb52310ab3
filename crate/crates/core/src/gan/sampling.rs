use std::collections::BTreeMap;

use super::checkpoint::GanCheckpoint;
use super::steps::{one_hot, sample_latent};
use crate::dataio::SpectraTable;
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::seed::rng_from;

/// Rows generated per forward pass; results do not depend on it.
const CHUNK: usize = 1024;

impl GanCheckpoint {
    /// `n` spectra of class `class_id`, flagged synthetic. Deterministic in `seed`.
    pub fn sample(&self, class_id: u16, n: usize, seed: u64) -> Result<SpectraTable> {
        if class_id == 0 || class_id > self.n_classes {
            return Err(Error::Label(format!("cannot sample class {class_id}; valid ids are 1..={}", self.n_classes)));
        }
        let mut rng = rng_from(seed);
        let z = sample_latent(&mut rng, n, self.latent_dim());
        let mut spectra = Matrix::zeros(0, self.n_bands);
        let rows: Vec<usize> = (0..n).collect();
        for chunk in rows.chunks(CHUNK) {
            let cond = one_hot(&vec![class_id; chunk.len()], self.n_classes)?;
            spectra = spectra.vstack(&self.generate(&z.select_rows(chunk), &cond)?)?;
        }
        let table = SpectraTable::new(spectra, vec![class_id; n], None, self.n_classes, BTreeMap::new())?;
        Ok(table.mark_synthetic())
    }

    /// Walks the latent and label space from `(z0, y0)` to `(z1, y1)` in `steps` rows.
    ///
    /// Row `k` uses `α = k / (steps − 1)`, latent `(1 − α)·z0 + α·z1` and
    /// conditioning `(1 − α)·onehot(y0) + α·onehot(y1)`. Rows are labeled with
    /// whichever endpoint class is nearer (`y0` at the midpoint).
    pub fn interpolate(&self, z0: &[f64], z1: &[f64], y0: u16, y1: u16, steps: usize) -> Result<SpectraTable> {
        if steps < 2 {
            return Err(Error::Contract(format!("interpolation needs at least 2 steps, got {steps}")));
        }
        let d = self.latent_dim();
        if z0.len() != d || z1.len() != d {
            return Err(Error::shape(
                "interpolate",
                format!("latent_dim {d}"),
                format!("z0[{}], z1[{}]", z0.len(), z1.len()),
            ));
        }
        let h0 = one_hot(&[y0], self.n_classes)?;
        let h1 = one_hot(&[y1], self.n_classes)?;
        let k = self.n_classes as usize;
        let mut z = Matrix::zeros(steps, d);
        let mut cond = Matrix::zeros(steps, k);
        let mut labels = Vec::with_capacity(steps);
        for (step, alpha) in interpolation_alphas(steps).into_iter().enumerate() {
            for ((o, &a), &b) in z.row_mut(step).iter_mut().zip(z0).zip(z1) {
                *o = (1.0 - alpha) * a + alpha * b;
            }
            for ((o, &a), &b) in cond.row_mut(step).iter_mut().zip(h0.as_slice()).zip(h1.as_slice()) {
                *o = (1.0 - alpha) * a + alpha * b;
            }
            labels.push(if alpha <= 0.5 { y0 } else { y1 });
        }
        let spectra = self.generate(&z, &cond)?;
        Ok(SpectraTable::new(spectra, labels, None, self.n_classes, BTreeMap::new())?.mark_synthetic())
    }
}

/// `α_k = k / (steps − 1)` for `k = 0..steps`.
pub fn interpolation_alphas(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect()
}
