use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::table::SpectraTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitAxis {
    /// Boundary is a column index: train is `col < boundary`.
    Column,
    /// Boundary is a row index: train is `row < boundary`.
    Row,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitSpec {
    /// Uniformly sample `floor(fraction · labeled)` labeled rows for training.
    RandomFraction { fraction: f64, seed: u64 },
    /// Partition pixels by position against a boundary.
    SpatialHalves { axis: SplitAxis, boundary: u32 },
}

impl SplitSpec {
    /// Spatial split at the middle of the image extent along `axis`.
    pub fn spatial_halves(table: &SpectraTable, axis: SplitAxis) -> Result<SplitSpec> {
        let coords = table
            .coords()
            .ok_or_else(|| Error::Contract("spatial split needs pixel coordinates".into()))?;
        let extent = coords.iter().map(|&(r, c)| axis_value(axis, r, c)).max().map_or(0, |m| m + 1);
        Ok(SplitSpec::SpatialHalves {
            axis,
            boundary: extent / 2,
        })
    }

    /// Same split with its sampling seed replaced; spatial splits are unchanged.
    pub fn reseeded(self, seed: u64) -> SplitSpec {
        match self {
            SplitSpec::RandomFraction { fraction, .. } => SplitSpec::RandomFraction { fraction, seed },
            spatial => spatial,
        }
    }

    /// Short descriptor used in reports, e.g. `random-0.03` or `spatial-col-16`.
    pub fn descriptor(&self) -> String {
        match *self {
            SplitSpec::RandomFraction { fraction, .. } => format!("random-{fraction}"),
            SplitSpec::SpatialHalves { axis, boundary } => format!(
                "spatial-{}-{boundary}",
                match axis {
                    SplitAxis::Column => "col",
                    SplitAxis::Row => "row",
                }
            ),
        }
    }
}

fn axis_value(axis: SplitAxis, row: u32, col: u32) -> u32 {
    match axis {
        SplitAxis::Column => col,
        SplitAxis::Row => row,
    }
}

/// Row indices of each side of a split, with the tables they select.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: SpectraTable,
    pub test: SpectraTable,
    /// Rows in neither set (unlabeled rows of a random split).
    pub unlabeled: SpectraTable,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub unlabeled_rows: Vec<usize>,
}

pub fn split(table: &SpectraTable, spec: &SplitSpec) -> Result<Split> {
    let (train_rows, test_rows, unlabeled_rows) = match *spec {
        SplitSpec::RandomFraction { fraction, seed } => {
            if !(fraction > 0.0 && fraction < 1.0) {
                return Err(Error::Config(format!("split fraction must be in (0, 1), got {fraction}")));
            }
            let labeled = table.labeled_indices();
            let k = (fraction * labeled.len() as f64).floor() as usize;
            if k == 0 {
                return Err(Error::Contract(format!(
                    "fraction {fraction} of {} labeled rows selects nothing",
                    labeled.len()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked = rand::seq::index::sample(&mut rng, labeled.len(), k).into_vec();
            picked.sort_unstable();
            let mut in_train = vec![false; labeled.len()];
            picked.iter().for_each(|&p| in_train[p] = true);
            let train = picked.iter().map(|&p| labeled[p]).collect();
            let test = labeled
                .iter()
                .zip(&in_train)
                .filter(|(_, &t)| !t)
                .map(|(&i, _)| i)
                .collect();
            (train, test, table.unlabeled_indices())
        }
        SplitSpec::SpatialHalves { axis, boundary } => {
            let coords = table
                .coords()
                .ok_or_else(|| Error::Contract("spatial split needs pixel coordinates".into()))?;
            let extent = coords.iter().map(|&(r, c)| axis_value(axis, r, c)).max().map_or(0, |m| m + 1);
            if boundary == 0 || boundary >= extent {
                return Err(Error::Config(format!(
                    "spatial boundary {boundary} outside image extent 1..{extent}"
                )));
            }
            let (train, test): (Vec<usize>, Vec<usize>) =
                (0..table.n_rows()).partition(|&i| axis_value(axis, coords[i].0, coords[i].1) < boundary);
            (train, test, Vec::new())
        }
    };
    Ok(Split {
        train: table.select(&train_rows),
        test: table.select(&test_rows),
        unlabeled: table.select(&unlabeled_rows),
        train_rows,
        test_rows,
        unlabeled_rows,
    })
}
