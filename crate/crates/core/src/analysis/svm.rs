//! One-vs-rest linear SVM trained by stochastic subgradient descent on the
//! L2-regularized hinge loss (Pegasos step sizes `1 / (λ t)`).
//!
//! Training runs on bands standardized with the training mean and standard
//! deviation; the returned hyperplanes are mapped back to raw band values. The
//! bias is the weight of a constant feature. Each hyperplane averages the
//! iterates of the second half of training.

use rand::seq::SliceRandom;

use crate::dataio::SpectraTable;
use crate::error::{Error, Result};
use crate::numerics::{argmax, dot};
use crate::seed::{derive_seed, rng_from};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub regularization: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            regularization: 1e-2,
            epochs: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    pub weights: Vec<f64>,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvmModel {
    /// Class ids, ascending; `planes[i]` separates `classes[i]` from the rest.
    pub classes: Vec<u16>,
    pub planes: Vec<Hyperplane>,
    pub config: SvmConfig,
}

impl LinearSvmModel {
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.planes.iter().map(|p| dot(&p.weights, x) + p.bias).collect()
    }

    /// Highest one-vs-rest score; ties go to the lowest class id.
    pub fn predict(&self, x: &[f64]) -> u16 {
        self.classes[argmax(&self.scores(x))]
    }
}

pub fn svm_train(table: &SpectraTable, config: &SvmConfig) -> Result<LinearSvmModel> {
    if !(config.regularization > 0.0) || config.epochs == 0 {
        return Err(Error::Config(format!(
            "SVM needs regularization > 0 and epochs > 0, got {config:?}"
        )));
    }
    let rows = table.labeled_indices();
    let classes = table.labeled().present_classes();
    if classes.len() < 2 {
        return Err(Error::Contract(format!(
            "SVM training needs at least 2 classes, found {}",
            classes.len()
        )));
    }
    let (scaled, mean, scale) = standardize(table, &rows);
    let labels: Vec<u16> = rows.iter().map(|&i| table.labels()[i]).collect();
    let planes = classes
        .iter()
        .map(|&c| {
            let plane = train_binary(&scaled, &labels, table.n_bands(), c, config);
            let weights: Vec<f64> = plane.weights.iter().zip(&scale).map(|(w, s)| w / s).collect();
            let bias = plane.bias - dot(&weights, &mean);
            Hyperplane { weights, bias }
        })
        .collect();
    Ok(LinearSvmModel {
        classes,
        planes,
        config: *config,
    })
}

/// Row-major standardized copies of `rows`, with the per-band mean and scale.
fn standardize(table: &SpectraTable, rows: &[usize]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let d = table.n_bands();
    let n = rows.len() as f64;
    let mut mean = vec![0.0; d];
    for &i in rows {
        mean.iter_mut().zip(table.spectrum(i)).for_each(|(m, &x)| *m += x / n);
    }
    let mut var = vec![0.0; d];
    for &i in rows {
        var.iter_mut()
            .zip(table.spectrum(i))
            .zip(&mean)
            .for_each(|((v, &x), m)| *v += (x - m) * (x - m) / n);
    }
    let scale: Vec<f64> = var.iter().map(|v| if *v > 1e-24 { v.sqrt() } else { 1.0 }).collect();
    let scaled = rows
        .iter()
        .flat_map(|&i| {
            table
                .spectrum(i)
                .iter()
                .zip(&mean)
                .zip(&scale)
                .map(|((x, m), s)| (x - m) / s)
                .collect::<Vec<_>>()
        })
        .collect();
    (scaled, mean, scale)
}

fn train_binary(x: &[f64], labels: &[u16], d: usize, positive: u16, config: &SvmConfig) -> Hyperplane {
    let lambda = config.regularization;
    let mut rng = rng_from(derive_seed(config.seed, positive as u64));
    // Last coordinate is the bias.
    let mut w = vec![0.0; d + 1];
    let mut avg = vec![0.0; d + 1];
    let mut averaged = 0usize;
    let average_from = config.epochs / 2;
    let mut order: Vec<usize> = (0..labels.len()).collect();
    let mut t = 0usize;
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let xi = &x[i * d..(i + 1) * d];
            let y = if labels[i] == positive { 1.0 } else { -1.0 };
            let eta = 1.0 / (lambda * t as f64);
            let margin = y * (dot(&w[..d], xi) + w[d]);
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|v| *v *= shrink);
            if margin < 1.0 {
                w[..d].iter_mut().zip(xi).for_each(|(v, &xj)| *v += eta * y * xj);
                w[d] += eta * y;
            }
            if epoch >= average_from {
                averaged += 1;
                avg.iter_mut().zip(&w).for_each(|(a, &v)| *a += v);
            }
        }
    }
    avg.iter_mut().for_each(|a| *a /= averaged.max(1) as f64);
    Hyperplane {
        bias: avg[d],
        weights: avg[..d].to_vec(),
    }
}

/// Fraction of labeled rows whose predicted class matches the label.
pub fn svm_accuracy(model: &LinearSvmModel, table: &SpectraTable) -> Result<f64> {
    if table.n_bands() != model.planes[0].weights.len() {
        return Err(Error::shape(
            "svm_accuracy",
            format!("{} bands", table.n_bands()),
            format!("model {} bands", model.planes[0].weights.len()),
        ));
    }
    let rows = table.labeled_indices();
    if rows.is_empty() {
        return Err(Error::Contract("accuracy needs labeled rows".into()));
    }
    let correct = rows
        .iter()
        .filter(|&&i| model.predict(table.spectrum(i)) == table.labels()[i])
        .count();
    Ok(correct as f64 / rows.len() as f64)
}
