//! The `.hsit` table file.
//!
//! ```text
//! "HSIT" | version u16 | rows u64 | bands u64 | classes u64 | flags u8 (bit 0: coords)
//! spectra   rows·bands × f64
//! labels    rows × u16
//! synthetic rows × u8
//! coords    rows × (u32 row, u32 col)        if flag bit 0
//! names     count u64, then (id u16, len u64, utf-8 bytes) each
//! crc32     u32 over every preceding byte
//! ```
//!
//! All integers and floats are little-endian.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::table::SpectraTable;
use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

pub const TABLE_MAGIC: &[u8; 4] = b"HSIT";
pub const TABLE_VERSION: u16 = 1;

const FLAG_COORDS: u8 = 1;

pub fn encode_table(table: &SpectraTable) -> Vec<u8> {
    let mut w = Writer::new(TABLE_MAGIC, TABLE_VERSION);
    w.count(table.n_rows());
    w.count(table.n_bands());
    w.count(table.n_classes() as usize);
    w.u8(if table.coords().is_some() { FLAG_COORDS } else { 0 });
    w.f64s(table.spectra().as_slice());
    for &l in table.labels() {
        w.u16(l);
    }
    for &s in table.synthetic() {
        w.u8(s as u8);
    }
    if let Some(coords) = table.coords() {
        for &(r, c) in coords {
            w.u32(r);
            w.u32(c);
        }
    }
    w.count(table.class_names().len());
    for (&id, name) in table.class_names() {
        w.u16(id);
        w.str(name);
    }
    w.finish()
}

pub fn decode_table(bytes: &[u8]) -> Result<SpectraTable> {
    let mut r = Reader::open(bytes, TABLE_MAGIC, TABLE_VERSION)?;
    let rows = r.count(0)?;
    let bands = r.count(0)?;
    let classes = r.u64()?;
    let classes = u16::try_from(classes).map_err(|_| Error::Format(format!("class count {classes} exceeds u16")))?;
    let flags = r.u8()?;
    if flags & !FLAG_COORDS != 0 {
        return Err(Error::Format(format!("unknown flags {flags:#04x}")));
    }
    let n_values = rows
        .checked_mul(bands)
        .ok_or_else(|| Error::Format("table dimensions overflow".into()))?;
    let spectra = Matrix::from_vec(rows, bands, r.f64s(n_values)?)?;
    let labels = (0..rows).map(|_| r.u16()).collect::<Result<Vec<_>>>()?;
    let synthetic = (0..rows)
        .map(|_| match r.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(Error::Format(format!("invalid provenance flag {v}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let coords = if flags & FLAG_COORDS != 0 {
        Some((0..rows).map(|_| Ok((r.u32()?, r.u32()?))).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    let n_names = r.count(10)?;
    let mut names = BTreeMap::new();
    for _ in 0..n_names {
        let id = r.u16()?;
        names.insert(id, r.str()?);
    }
    r.finish()?;
    SpectraTable::with_provenance(spectra, labels, coords, synthetic, classes, names)
}

pub fn write_table(path: impl AsRef<Path>, table: &SpectraTable) -> Result<()> {
    fs::write(path, encode_table(table))?;
    Ok(())
}

pub fn read_table(path: impl AsRef<Path>) -> Result<SpectraTable> {
    decode_table(&fs::read(path)?)
}
