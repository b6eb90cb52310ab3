use crate::dataio::SpectraTable;
use crate::error::{Error, Result};

/// Per-band mean and population standard deviation of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub class_id: u16,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub count: usize,
}

/// Statistics for every class with at least one row. Unlabeled rows are ignored.
pub fn class_stats(table: &SpectraTable) -> Result<Vec<ClassStats>> {
    let hist = table.class_histogram();
    if hist.iter().skip(1).all(|&n| n == 0) {
        return Err(Error::Contract("class statistics need labeled rows".into()));
    }
    let bands = table.n_bands();
    let mut out = Vec::new();
    for class in 1..=table.n_classes() {
        let count = hist[class as usize];
        if count == 0 {
            log::debug!("class {class} has no rows; skipped");
            continue;
        }
        let rows: Vec<&[f64]> = (0..table.n_rows())
            .filter(|&i| table.labels()[i] == class)
            .map(|i| table.spectrum(i))
            .collect();
        let n = count as f64;
        let mut mean = vec![0.0; bands];
        for row in &rows {
            mean.iter_mut().zip(*row).for_each(|(m, &v)| *m += v);
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; bands];
        for row in &rows {
            for ((s, &v), &m) in var.iter_mut().zip(*row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
        out.push(ClassStats {
            class_id: class,
            mean,
            std,
            count,
        });
    }
    Ok(out)
}
