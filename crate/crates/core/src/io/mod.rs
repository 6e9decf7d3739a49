//! File formats: binary sinograms, image rasters, phantom descriptions and
//! `key = value` run configurations. Multi-byte fields are little-endian
//! except the PGM samples, which the format fixes as big-endian.

mod image;
mod sinogram;
mod text;

pub use image::{
    read_raw_image, write_pgm16, write_raw_image, write_scaling_csv, PgmScaling, RAW_HEADER_LEN,
};
pub use sinogram::{
    read_cone_sinogram, read_radon_sinogram, write_cone_sinogram, write_radon_sinogram, CONE_MAGIC,
    RADON_MAGIC,
};
pub use text::{format_phantom, parse_key_values, parse_phantom, KeyValues};

use crate::error::Error;

pub(crate) fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

/// Cursor over a byte slice that reports truncation as a format error.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn take(&mut self, n: usize) -> crate::Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| format_err(format!("file truncated at byte {}", self.pos)))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    pub(crate) fn u32(&mut self) -> crate::Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub(crate) fn f64(&mut self) -> crate::Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub(crate) fn f64s(&mut self, n: usize) -> crate::Result<Vec<f64>> {
        let len = n
            .checked_mul(8)
            .ok_or_else(|| format_err("value count overflows"))?;
        Ok(self
            .take(len)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub(crate) fn finish(&self) -> crate::Result<()> {
        if self.pos != self.bytes.len() {
            return Err(format_err(format!(
                "{} trailing bytes",
                self.bytes.len() - self.pos
            )));
        }
        Ok(())
    }
}

pub(crate) fn push_u32(out: &mut Vec<u8>, v: usize) -> crate::Result<()> {
    let v = u32::try_from(v).map_err(|_| format_err(format!("{v} does not fit in u32")))?;
    out.extend_from_slice(&v.to_le_bytes());
    Ok(())
}

pub(crate) fn push_f64s(out: &mut Vec<u8>, values: &[f64]) {
    out.reserve(8 * values.len());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}
