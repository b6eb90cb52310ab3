//! Raw binary cubes: a `key: value` text header plus a flat payload.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::table::{PixelCoord, SpectraTable};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interleave {
    /// All pixels of band 0, then band 1, ...
    BandSequential,
    /// All bands of pixel 0, then pixel 1, ...
    PixelInterleaved,
}

impl FromStr for Interleave {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bsq" | "band-sequential" => Ok(Interleave::BandSequential),
            "bip" | "pixel-interleaved" => Ok(Interleave::PixelInterleaved),
            other => Err(Error::Format(format!("unknown interleave {other:?}"))),
        }
    }
}

impl fmt::Display for Interleave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Interleave::BandSequential => "bsq",
            Interleave::PixelInterleaved => "bip",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueEncoding {
    U16Le,
    F32Le,
}

impl ValueEncoding {
    pub fn byte_width(self) -> usize {
        match self {
            ValueEncoding::U16Le => 2,
            ValueEncoding::F32Le => 4,
        }
    }
}

impl FromStr for ValueEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "u16" | "uint16" => Ok(ValueEncoding::U16Le),
            "f32" | "float32" => Ok(ValueEncoding::F32Le),
            other => Err(Error::Format(format!("unknown dtype {other:?}"))),
        }
    }
}

impl fmt::Display for ValueEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueEncoding::U16Le => "u16",
            ValueEncoding::F32Le => "f32",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubeHeader {
    pub height: usize,
    pub width: usize,
    pub bands: usize,
    pub interleave: Interleave,
    pub encoding: ValueEncoding,
    /// Informational maximum reflectance, carried through from the header.
    pub max_reflectance: Option<f64>,
}

impl CubeHeader {
    /// Parses `key: value` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("header line {}: expected `key: value`", n + 1)))?;
            fields.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
        }
        let count = |key: &str| -> Result<usize> {
            let raw = fields
                .get(key)
                .ok_or_else(|| Error::Format(format!("header missing `{key}`")))?;
            match raw.parse::<usize>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(Error::Format(format!("header `{key}` must be a positive integer, got {raw:?}"))),
            }
        };
        let header = CubeHeader {
            height: count("height")?,
            width: count("width")?,
            bands: count("bands")?,
            interleave: fields
                .get("interleave")
                .ok_or_else(|| Error::Format("header missing `interleave`".into()))?
                .parse()?,
            encoding: fields
                .get("dtype")
                .ok_or_else(|| Error::Format("header missing `dtype`".into()))?
                .parse()?,
            max_reflectance: match fields.get("scale") {
                None => None,
                Some(raw) => Some(
                    raw.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite() && *v > 0.0)
                        .ok_or_else(|| Error::Format(format!("header `scale` must be a positive number, got {raw:?}")))?,
                ),
            },
        };
        for key in fields.keys() {
            if !["height", "width", "bands", "interleave", "dtype", "scale"].contains(&key.as_str()) {
                return Err(Error::Format(format!("unknown header key `{key}`")));
            }
        }
        Ok(header)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "height: {}\nwidth: {}\nbands: {}\ninterleave: {}\ndtype: {}\n",
            self.height, self.width, self.bands, self.interleave, self.encoding
        );
        if let Some(m) = self.max_reflectance {
            s.push_str(&format!("scale: {m}\n"));
        }
        s
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    pub fn payload_len(&self) -> usize {
        self.pixels() * self.bands * self.encoding.byte_width()
    }

    /// Byte offset of `(pixel, band)` in the payload.
    fn value_index(&self, pixel: usize, band: usize) -> usize {
        match self.interleave {
            Interleave::BandSequential => band * self.pixels() + pixel,
            Interleave::PixelInterleaved => pixel * self.bands + band,
        }
    }
}

/// Flattens a cube into one row per pixel, in row-major pixel order.
///
/// `labels` is the per-pixel class map; values are left unnormalized.
pub fn load_cube(header: &CubeHeader, payload: &[u8], labels: &[u16]) -> Result<SpectraTable> {
    if payload.len() != header.payload_len() {
        return Err(Error::Format(format!(
            "payload size mismatch: expected {} bytes, got {}",
            header.payload_len(),
            payload.len()
        )));
    }
    if labels.len() != header.pixels() {
        return Err(Error::Format(format!(
            "label map size mismatch: expected {} pixels, got {}",
            header.pixels(),
            labels.len()
        )));
    }
    let width = header.encoding.byte_width();
    let mut values = Vec::with_capacity(header.pixels() * header.bands);
    for pixel in 0..header.pixels() {
        for band in 0..header.bands {
            let at = header.value_index(pixel, band) * width;
            let bytes = &payload[at..at + width];
            let v = match header.encoding {
                ValueEncoding::U16Le => u16::from_le_bytes([bytes[0], bytes[1]]) as f64,
                ValueEncoding::F32Le => f32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]) as f64,
            };
            if !v.is_finite() {
                return Err(Error::Format(format!("non-finite value at pixel {pixel}, band {band}")));
            }
            values.push(v);
        }
    }
    let coords: Vec<PixelCoord> = (0..header.height)
        .flat_map(|r| (0..header.width).map(move |c| (r as u32, c as u32)))
        .collect();
    let n_classes = labels.iter().copied().max().unwrap_or(0);
    SpectraTable::new(
        Matrix::from_vec(header.pixels(), header.bands, values)?,
        labels.to_vec(),
        Some(coords),
        n_classes,
        BTreeMap::new(),
    )
}

/// Inverse of [`load_cube`]'s value decoding: `values` is pixel-major
/// (`pixel * bands + band`). Values are converted to the header's encoding.
pub fn encode_cube(header: &CubeHeader, values: &[f64]) -> Result<Vec<u8>> {
    if values.len() != header.pixels() * header.bands {
        return Err(Error::Format(format!(
            "expected {} values, got {}",
            header.pixels() * header.bands,
            values.len()
        )));
    }
    let width = header.encoding.byte_width();
    let mut out = vec![0u8; header.payload_len()];
    for pixel in 0..header.pixels() {
        for band in 0..header.bands {
            let v = values[pixel * header.bands + band];
            let at = header.value_index(pixel, band) * width;
            match header.encoding {
                ValueEncoding::U16Le => {
                    let q = v.round().clamp(0.0, u16::MAX as f64) as u16;
                    out[at..at + 2].copy_from_slice(&q.to_le_bytes());
                }
                ValueEncoding::F32Le => out[at..at + 4].copy_from_slice(&(v as f32).to_le_bytes()),
            }
        }
    }
    Ok(out)
}

/// Decodes a raw row-major little-endian `u16` label map.
pub fn decode_label_map(bytes: &[u8]) -> Result<Vec<u16>> {
    if bytes.len() % 2 != 0 {
        return Err(Error::Format(format!("label map has odd byte length {}", bytes.len())));
    }
    Ok(bytes.chunks_exact(2).map(|b| u16::from_le_bytes([b[0], b[1]])).collect())
}

pub fn encode_label_map(labels: &[u16]) -> Vec<u8> {
    labels.iter().flat_map(|l| l.to_le_bytes()).collect()
}
