use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Class id reserved for pixels without ground truth.
pub const UNLABELED: u16 = 0;

/// Pixel position `(row, col)` in the source image.
pub type PixelCoord = (u32, u32);

/// Spectra (one per row) with class labels, optional pixel positions and a
/// per-row synthetic flag.
///
/// Labels run from 1 to `n_classes`; 0 means unlabeled.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectraTable {
    spectra: Matrix,
    labels: Vec<u16>,
    coords: Option<Vec<PixelCoord>>,
    synthetic: Vec<bool>,
    n_classes: u16,
    class_names: BTreeMap<u16, String>,
}

impl SpectraTable {
    pub fn new(
        spectra: Matrix,
        labels: Vec<u16>,
        coords: Option<Vec<PixelCoord>>,
        n_classes: u16,
        class_names: BTreeMap<u16, String>,
    ) -> Result<Self> {
        let synthetic = vec![false; spectra.rows()];
        Self::with_provenance(spectra, labels, coords, synthetic, n_classes, class_names)
    }

    pub fn with_provenance(
        spectra: Matrix,
        labels: Vec<u16>,
        coords: Option<Vec<PixelCoord>>,
        synthetic: Vec<bool>,
        n_classes: u16,
        class_names: BTreeMap<u16, String>,
    ) -> Result<Self> {
        let n = spectra.rows();
        if labels.len() != n || synthetic.len() != n {
            return Err(Error::shape(
                "SpectraTable",
                format!("{n} spectra"),
                format!("{} labels, {} provenance flags", labels.len(), synthetic.len()),
            ));
        }
        if !spectra.is_finite() {
            return Err(Error::Numeric("table contains non-finite values".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l > n_classes) {
            return Err(Error::Label(format!("label {bad} exceeds declared class count {n_classes}")));
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::shape("SpectraTable", format!("{n} spectra"), format!("{} coords", c.len())));
            }
            let mut seen = HashSet::with_capacity(n);
            if let Some(dup) = c.iter().find(|p| !seen.insert(**p)) {
                return Err(Error::Contract(format!("duplicate pixel coordinate {dup:?}")));
            }
        }
        Ok(Self {
            spectra,
            labels,
            coords,
            synthetic,
            n_classes,
            class_names,
        })
    }

    pub fn empty(n_bands: usize, n_classes: u16) -> Self {
        Self {
            spectra: Matrix::zeros(0, n_bands),
            labels: Vec::new(),
            coords: None,
            synthetic: Vec::new(),
            n_classes,
            class_names: BTreeMap::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.spectra.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows() == 0
    }

    pub fn n_bands(&self) -> usize {
        self.spectra.cols()
    }

    pub fn n_classes(&self) -> u16 {
        self.n_classes
    }

    pub fn spectra(&self) -> &Matrix {
        &self.spectra
    }

    pub fn spectrum(&self, row: usize) -> &[f64] {
        self.spectra.row(row)
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    pub fn coords(&self) -> Option<&[PixelCoord]> {
        self.coords.as_deref()
    }

    pub fn synthetic(&self) -> &[bool] {
        &self.synthetic
    }

    pub fn class_names(&self) -> &BTreeMap<u16, String> {
        &self.class_names
    }

    pub fn set_class_names(&mut self, names: BTreeMap<u16, String>) {
        self.class_names = names;
    }

    /// Marks every row as generated.
    pub fn mark_synthetic(mut self) -> Self {
        self.synthetic.iter_mut().for_each(|s| *s = true);
        self
    }

    pub fn labeled_indices(&self) -> Vec<usize> {
        (0..self.n_rows()).filter(|&i| self.labels[i] != UNLABELED).collect()
    }

    pub fn unlabeled_indices(&self) -> Vec<usize> {
        (0..self.n_rows()).filter(|&i| self.labels[i] == UNLABELED).collect()
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.labels.iter().all(|&l| l != UNLABELED)
    }

    /// Row counts per class id, index 0 counting unlabeled rows.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.n_classes as usize + 1];
        for &l in &self.labels {
            h[l as usize] += 1;
        }
        h
    }

    /// Class ids (≥ 1) with at least one row, ascending.
    pub fn present_classes(&self) -> Vec<u16> {
        self.class_histogram()
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &n)| n > 0)
            .map(|(c, _)| c as u16)
            .collect()
    }

    /// New table holding the given rows, in order.
    pub fn select(&self, rows: &[usize]) -> SpectraTable {
        SpectraTable {
            spectra: self.spectra.select_rows(rows),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            coords: self.coords.as_ref().map(|c| rows.iter().map(|&i| c[i]).collect()),
            synthetic: rows.iter().map(|&i| self.synthetic[i]).collect(),
            n_classes: self.n_classes,
            class_names: self.class_names.clone(),
        }
    }

    pub fn labeled(&self) -> SpectraTable {
        self.select(&self.labeled_indices())
    }

    /// Appends `other`'s rows. Coordinates survive only if both tables carry them.
    pub fn concat(&self, other: &SpectraTable) -> Result<SpectraTable> {
        if self.n_bands() != other.n_bands() && !self.is_empty() && !other.is_empty() {
            return Err(Error::shape(
                "SpectraTable::concat",
                format!("{} bands", self.n_bands()),
                format!("{} bands", other.n_bands()),
            ));
        }
        let coords = match (&self.coords, &other.coords) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ if other.is_empty() => self.coords.clone(),
            _ if self.is_empty() => other.coords.clone(),
            _ => None,
        };
        let mut names = self.class_names.clone();
        for (k, v) in &other.class_names {
            names.entry(*k).or_insert_with(|| v.clone());
        }
        SpectraTable::with_provenance(
            self.spectra.vstack(&other.spectra)?,
            self.labels.iter().chain(&other.labels).copied().collect(),
            coords,
            self.synthetic.iter().chain(&other.synthetic).copied().collect(),
            self.n_classes.max(other.n_classes),
            names,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SpectraTable {
        let spectra = Matrix::from_rows(&[vec![0.1, 0.2], vec![0.3, 0.4], vec![0.5, 0.6]]).unwrap();
        SpectraTable::new(spectra, vec![1, 0, 2], Some(vec![(0, 0), (0, 1), (1, 0)]), 2, BTreeMap::new()).unwrap()
    }

    #[test]
    fn histogram_and_selection() {
        let t = table();
        assert_eq!(t.class_histogram(), vec![1, 1, 1]);
        assert_eq!(t.present_classes(), vec![1, 2]);
        let l = t.labeled();
        assert_eq!(l.labels(), &[1, 2]);
        assert_eq!(l.coords().unwrap(), &[(0, 0), (1, 0)]);
    }

    #[test]
    fn rejects_duplicate_coords_and_bad_labels() {
        let spectra = Matrix::zeros(2, 1);
        assert!(SpectraTable::new(spectra.clone(), vec![1, 1], Some(vec![(0, 0), (0, 0)]), 1, BTreeMap::new()).is_err());
        assert!(matches!(
            SpectraTable::new(spectra, vec![1, 3], None, 2, BTreeMap::new()),
            Err(Error::Label(_))
        ));
    }

    #[test]
    fn concat_drops_coords_when_one_side_lacks_them() {
        let t = table();
        let fake = SpectraTable::new(Matrix::filled(1, 2, 0.5), vec![1], None, 2, BTreeMap::new())
            .unwrap()
            .mark_synthetic();
        let joined = t.concat(&fake).unwrap();
        assert_eq!(joined.n_rows(), 4);
        assert!(joined.coords().is_none());
        assert_eq!(joined.synthetic(), &[false, false, false, true]);
    }
}
