//! Two-component PCA by power iteration with deflation.

use crate::error::{Error, Result};
use crate::numerics::{dot, l2_norm, Matrix};

const MAX_ITERATIONS: usize = 200_000;
const TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct Pca2Projection {
    pub component_1: Vec<f64>,
    pub component_2: Vec<f64>,
    pub mean: Vec<f64>,
    /// Variance along each component, nonincreasing.
    pub explained_variance: (f64, f64),
    pub total_variance: f64,
}

impl Pca2Projection {
    /// Fraction of the total variance captured by the two components.
    pub fn explained_ratio(&self) -> f64 {
        (self.explained_variance.0 + self.explained_variance.1) / self.total_variance
    }
}

/// Population covariance of the rows of `data` about `mean`.
fn covariance(data: &Matrix, mean: &[f64]) -> Matrix {
    let mut centered = data.clone();
    for r in 0..centered.rows() {
        centered.row_mut(r).iter_mut().zip(mean).for_each(|(v, m)| *v -= m);
    }
    let mut cov = centered.t_matmul(&centered).expect("square");
    cov.scale(1.0 / data.rows() as f64);
    cov
}

/// Dominant eigenpair of symmetric `m`, kept orthogonal to `against`.
fn power_iteration(m: &Matrix, against: Option<&[f64]>) -> (Vec<f64>, f64) {
    let n = m.rows();
    // Start from the column with the largest diagonal entry, nudged off any
    // exact symmetry of the data.
    let start = (0..n).fold(0, |best, i| if m.get(i, i) > m.get(best, best) { i } else { best });
    let mut v: Vec<f64> = (0..n).map(|i| m.get(i, start) + 1e-3 * (1.0 + i as f64 / n as f64)).collect();
    let orthogonalize = |v: &mut Vec<f64>| {
        if let Some(u) = against {
            let p = dot(v, u);
            v.iter_mut().zip(u).for_each(|(x, &ui)| *x -= p * ui);
        }
        let norm = l2_norm(v);
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
    };
    orthogonalize(&mut v);
    for _ in 0..MAX_ITERATIONS {
        let mut next: Vec<f64> = (0..n).map(|i| dot(m.row(i), &v)).collect();
        orthogonalize(&mut next);
        if l2_norm(&next) == 0.0 {
            return (v, 0.0);
        }
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if delta < TOLERANCE {
            break;
        }
    }
    let mv: Vec<f64> = (0..n).map(|i| dot(m.row(i), &v)).collect();
    (v.clone(), dot(&v, &mv))
}

/// Flips `v` so its largest-magnitude entry is positive.
fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    let pivot = v
        .iter()
        .enumerate()
        .fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

pub fn fit_pca2(data: &Matrix) -> Result<Pca2Projection> {
    if data.rows() < 3 {
        return Err(Error::Contract(format!("PCA needs at least 3 rows, got {}", data.rows())));
    }
    if data.cols() < 2 {
        return Err(Error::DegenerateRank(format!("{} band(s) cannot span two components", data.cols())));
    }
    let mut mean = data.column_sums();
    mean.iter_mut().for_each(|m| *m /= data.rows() as f64);
    let cov = covariance(data, &mean);
    let total: f64 = (0..cov.rows()).map(|i| cov.get(i, i)).sum();

    let (v1, l1) = power_iteration(&cov, None);
    let mut deflated = cov.clone();
    for i in 0..deflated.rows() {
        for j in 0..deflated.cols() {
            let x = deflated.get(i, j) - l1 * v1[i] * v1[j];
            deflated.set(i, j, x);
        }
    }
    let (v2, l2) = power_iteration(&deflated, Some(&v1));
    if !(total > 0.0) || l2 <= 1e-12 * total {
        return Err(Error::DegenerateRank(format!(
            "data has rank < 2 (variances {l1:e}, {l2:e} of total {total:e})"
        )));
    }
    Ok(Pca2Projection {
        component_1: canonical_sign(v1),
        component_2: canonical_sign(v2),
        mean,
        explained_variance: (l1, l2.min(l1)),
        total_variance: total,
    })
}

/// Coordinates of each row on the two components.
pub fn project(proj: &Pca2Projection, data: &Matrix) -> Result<Matrix> {
    if data.cols() != proj.mean.len() {
        return Err(Error::shape(
            "project",
            format!("data {}", data.shape_str()),
            format!("{} bands", proj.mean.len()),
        ));
    }
    let mut out = Matrix::zeros(data.rows(), 2);
    let mut centered = vec![0.0; data.cols()];
    for r in 0..data.rows() {
        centered
            .iter_mut()
            .zip(data.row(r))
            .zip(&proj.mean)
            .for_each(|((c, &x), &m)| *c = x - m);
        out.set(r, 0, dot(&centered, &proj.component_1));
        out.set(r, 1, dot(&centered, &proj.component_2));
    }
    Ok(out)
}
