use crate::dataio::SpectraTable;
use crate::error::{Error, Result};
use crate::gan::GanCheckpoint;
use crate::seed::derive_seed;

/// Splits `total` over `weights` in proportion, handing leftover units to the
/// largest fractional remainders (earlier entries first on ties).
pub fn proportional_counts(weights: &[usize], total: usize) -> Vec<usize> {
    let sum: usize = weights.iter().sum();
    if sum == 0 {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|&w| total as f64 * w as f64 / sum as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = total - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

/// Number of fake rows added for `n_real` real rows.
pub fn fake_count(fake_ratio: f64, n_real: usize) -> usize {
    (fake_ratio * n_real as f64).round() as usize
}

/// Appends `round(fake_ratio · n_real)` generated rows to `real_train`, split
/// over classes in proportion to its labeled histogram. Generated rows carry
/// the synthetic flag. Class `c` is sampled with seed `derive(seed, c)`.
pub fn augment_table(real_train: &SpectraTable, ckpt: &GanCheckpoint, fake_ratio: f64, seed: u64) -> Result<SpectraTable> {
    if !(fake_ratio >= 0.0 && fake_ratio.is_finite()) {
        return Err(Error::Contract(format!("fake ratio must be a finite value >= 0, got {fake_ratio}")));
    }
    let labeled = real_train.labeled();
    let total = fake_count(fake_ratio, labeled.n_rows());
    if total == 0 {
        return Ok(real_train.clone());
    }
    if ckpt.n_bands != real_train.n_bands() {
        return Err(Error::shape(
            "augment_table",
            format!("{} bands", real_train.n_bands()),
            format!("generator with {} bands", ckpt.n_bands),
        ));
    }
    let histogram = labeled.class_histogram();
    let classes: Vec<u16> = labeled.present_classes();
    if let Some(missing) = classes.iter().find(|c| !ckpt.classes.contains(c)) {
        return Err(Error::Label(format!(
            "generator was not trained on class {missing}; it knows {:?}",
            ckpt.classes
        )));
    }
    let weights: Vec<usize> = classes.iter().map(|&c| histogram[c as usize]).collect();
    let mut out = real_train.clone();
    for (&class, n) in classes.iter().zip(proportional_counts(&weights, total)) {
        if n > 0 {
            out = out.concat(&ckpt.sample(class, n, derive_seed(seed, class as u64))?)?;
        }
    }
    Ok(out)
}
