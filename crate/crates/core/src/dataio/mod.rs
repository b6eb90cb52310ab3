//! Ingestion of hyperspectral cubes into labeled spectra tables,
//! reflectance normalization, train/test splits and the `.hsit` file format.

mod cube;
mod format;
mod normalize;
mod split;
mod table;

pub use cube::{decode_label_map, encode_cube, encode_label_map, load_cube, CubeHeader, Interleave, ValueEncoding};
pub use format::{decode_table, encode_table, read_table, write_table, TABLE_MAGIC, TABLE_VERSION};
pub use normalize::normalize_reflectance;
pub use split::{split, Split, SplitAxis, SplitSpec};
pub use table::{PixelCoord, SpectraTable, UNLABELED};
