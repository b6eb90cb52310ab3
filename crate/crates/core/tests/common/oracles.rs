//! Independent reference implementations for the analysis routines.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use specgan_core::analysis::{class_stats, fit_pca2, svm_accuracy, svm_train, SvmConfig};
use specgan_core::dataio::SpectraTable;
use specgan_core::numerics::Matrix;

use super::rng;

/// Two Gaussian blobs in the plane, 20 points each, linearly separable.
pub fn planar_blobs(seed: u64) -> SpectraTable {
    let mut r = rng(seed);
    let noise = Normal::new(0.0, 0.06).unwrap();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..40 {
        let class = (i % 2) as u16 + 1;
        let (cx, cy) = if class == 1 { (0.35, 0.45) } else { (0.65, 0.6) };
        rows.push(vec![cx + noise.sample(&mut r), cy + noise.sample(&mut r)]);
        labels.push(class);
    }
    SpectraTable::new(Matrix::from_rows(&rows).unwrap(), labels, None, 2, BTreeMap::new()).unwrap()
}

/// Best training accuracy of any line `x·(cos θ, sin θ) > t` over a fine angle
/// grid and every threshold between consecutive projections.
pub fn brute_force_line_accuracy(table: &SpectraTable) -> f64 {
    let n = table.n_rows();
    let mut best = 0usize;
    for step in 0..7200 {
        let theta = step as f64 * std::f64::consts::TAU / 7200.0;
        let (c, s) = (theta.cos(), theta.sin());
        let mut proj: Vec<(f64, u16)> = (0..n)
            .map(|i| {
                let x = table.spectrum(i);
                (x[0] * c + x[1] * s, table.labels()[i])
            })
            .collect();
        proj.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Everything above the cut is class 2.
        let mut above_2 = proj.iter().filter(|p| p.1 == 2).count();
        let mut below_1 = 0;
        best = best.max(above_2 + below_1);
        for p in &proj {
            if p.1 == 2 {
                above_2 -= 1;
            } else {
                below_1 += 1;
            }
            best = best.max(above_2 + below_1);
        }
    }
    best as f64 / n as f64
}

/// (svm accuracy, brute-force accuracy) on the planar problem.
pub fn svm_vs_brute_force(seed: u64) -> (f64, f64) {
    let table = planar_blobs(seed);
    let config = SvmConfig { seed, ..SvmConfig::default() };
    let model = svm_train(&table, &config).unwrap();
    (svm_accuracy(&model, &table).unwrap(), brute_force_line_accuracy(&table))
}

/// Mean (svm, brute-force) training accuracy over `problems` planar problems.
///
/// A single 40-point problem has an accuracy quantum of 2.5 points, and a
/// soft-margin solution may give up one point of a barely separable set.
pub fn mean_svm_vs_brute_force(problems: u64) -> (f64, f64) {
    let (svm, brute) = (0..problems)
        .map(svm_vs_brute_force)
        .fold((0.0, 0.0), |(a, b), (s, t)| (a + s, b + t));
    (svm / problems as f64, brute / problems as f64)
}

/// Anisotropic correlated data with well separated leading variances.
pub fn pca_data(seed: u64, rows: usize, cols: usize) -> Matrix {
    let mut r = rng(seed);
    let scales: Vec<f64> = (0..cols).map(|j| 3.0 / (1.0 + j as f64).powf(1.3)).collect();
    let mix: Vec<Vec<f64>> = (0..cols).map(|_| (0..cols).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
    let data: Vec<f64> = (0..rows)
        .flat_map(|_| {
            let z: Vec<f64> = scales.iter().map(|s| s * r.random_range(-1.0..1.0)).collect();
            (0..cols)
                .map(|j| 0.5 + (0..cols).map(|k| mix[k][j] * z[k]).sum::<f64>() * 0.1)
                .collect::<Vec<_>>()
        })
        .collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

/// Top two eigenvectors of the population covariance from a dense solver.
pub fn eigen_top2(data: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = data.shape();
    let x = DMatrix::from_row_slice(n, d, data.as_slice());
    let mean = x.row_mean();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    let cov = centered.transpose() * &centered / n as f64;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let col = |k: usize| eig.eigenvectors.column(order[k]).iter().copied().collect::<Vec<f64>>();
    (col(0), col(1))
}

/// Smallest |cos| between fitted and reference components over both components.
pub fn pca_alignment(seed: u64, rows: usize, cols: usize) -> f64 {
    let data = pca_data(seed, rows, cols);
    let fit = fit_pca2(&data).unwrap();
    let (e1, e2) = eigen_top2(&data);
    let cos = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().abs();
    cos(&fit.component_1, &e1).min(cos(&fit.component_2, &e2))
}

/// Largest absolute deviation between `class_stats` and plain loops.
pub fn class_stats_max_error(table: &SpectraTable) -> f64 {
    let stats = class_stats(table).unwrap();
    let mut worst: f64 = 0.0;
    for s in &stats {
        let rows: Vec<usize> = (0..table.n_rows()).filter(|&i| table.labels()[i] == s.class_id).collect();
        assert_eq!(rows.len(), s.count);
        for b in 0..table.n_bands() {
            let mut sum = 0.0;
            for &i in &rows {
                sum += table.spectrum(i)[b];
            }
            let mean = sum / rows.len() as f64;
            let mut sq = 0.0;
            for &i in &rows {
                let d = table.spectrum(i)[b] - mean;
                sq += d * d;
            }
            let std = (sq / rows.len() as f64).sqrt();
            worst = worst.max((mean - s.mean[b]).abs()).max((std - s.std[b]).abs());
        }
    }
    worst
}
