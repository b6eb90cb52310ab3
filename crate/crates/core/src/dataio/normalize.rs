use super::table::SpectraTable;
use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// Maps the whole table affinely so its global minimum becomes 0 and maximum 1.
///
/// A constant table maps to all zeros and comes back with a warning.
pub fn normalize_reflectance(table: &SpectraTable) -> Result<(SpectraTable, Option<String>)> {
    let (lo, hi) = table
        .spectra()
        .min_max()
        .ok_or_else(|| Error::Contract("cannot normalize an empty table".into()))?;
    let (spectra, warning) = if hi > lo {
        let span = hi - lo;
        (table.spectra().map(|v| (v - lo) / span), None)
    } else {
        let msg = format!("constant table (all values {lo}); mapped to 0");
        log::warn!("{msg}");
        (Matrix::zeros(table.n_rows(), table.n_bands()), Some(msg))
    };
    let out = SpectraTable::with_provenance(
        spectra,
        table.labels().to_vec(),
        table.coords().map(<[_]>::to_vec),
        table.synthetic().to_vec(),
        table.n_classes(),
        table.class_names().clone(),
    )?;
    Ok((out, warning))
}
