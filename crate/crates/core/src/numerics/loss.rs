use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Mean softmax cross-entropy over the batch and its gradient w.r.t. the logits.
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<(f64, Matrix)> {
    if labels.len() != logits.rows() {
        return Err(Error::shape(
            "softmax_cross_entropy",
            format!("logits {}", logits.shape_str()),
            format!("{} labels", labels.len()),
        ));
    }
    let classes = logits.cols();
    if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
        return Err(Error::Label(format!("label index {bad} out of range for {classes} classes")));
    }
    let batch = logits.rows() as f64;
    let mut loss = 0.0;
    let mut grad = Matrix::zeros(logits.rows(), classes);
    for (b, &y) in labels.iter().enumerate() {
        let row = logits.row(b);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let denom: f64 = row.iter().map(|&v| (v - max).exp()).sum();
        let log_denom = denom.ln();
        loss += log_denom - (row[y] - max);
        let out = grad.row_mut(b);
        for (k, (o, &v)) in out.iter_mut().zip(row).enumerate() {
            let p = (v - max).exp() / denom;
            *o = (p - if k == y { 1.0 } else { 0.0 }) / batch;
        }
    }
    // Rounding can push a saturated loss a hair below zero.
    Ok(((loss / batch).max(0.0), grad))
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}
