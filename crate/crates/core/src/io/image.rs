use std::io::Write;
use std::path::Path;

use super::{format_err, push_f64s, push_u32, Reader};
use crate::geometry::{GridSpec, ImageGrid};
use crate::Result;

/// `u32` width, `u32` height, `f64` half extent.
pub const RAW_HEADER_LEN: usize = 16;

/// Header followed by row-major samples, row 0 at the smallest `y`.
pub fn write_raw_image(path: impl AsRef<Path>, img: &ImageGrid) -> Result<()> {
    let spec = img.spec();
    let mut out = Vec::with_capacity(RAW_HEADER_LEN + 8 * img.values().len());
    push_u32(&mut out, spec.n_px)?;
    push_u32(&mut out, spec.n_px)?;
    push_f64s(&mut out, &[spec.half_extent]);
    push_f64s(&mut out, img.values());
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a raw image onto a grid centered at the origin.
pub fn read_raw_image(path: impl AsRef<Path>) -> Result<ImageGrid> {
    let bytes = std::fs::read(path)?;
    let mut r = Reader::new(&bytes);
    let width = r.u32()? as usize;
    let height = r.u32()? as usize;
    if width != height {
        return Err(format_err(format!("raster {width}x{height} is not square")));
    }
    let half_extent = r.f64()?;
    let values = r.f64s(width * height)?;
    r.finish()?;
    ImageGrid::from_values(GridSpec::new(width, half_extent)?, values)
}

/// Affine map from image values to gray levels used by [`write_pgm16`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgmScaling {
    pub min: f64,
    pub max: f64,
    pub max_gray: u16,
}

impl PgmScaling {
    pub fn for_image(img: &ImageGrid) -> Self {
        let (min, max) = img
            .values()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(*v), hi.max(*v))
            });
        Self {
            min,
            max,
            max_gray: u16::MAX,
        }
    }

    /// Gray level of `v`; a constant image maps to 0.
    pub fn gray(&self, v: f64) -> u16 {
        let range = self.max - self.min;
        if !(range > 0.0) {
            return 0;
        }
        let t = ((v - self.min) / range).clamp(0.0, 1.0);
        (t * self.max_gray as f64).round() as u16
    }
}

/// Binary 16-bit PGM, min-max scaled, top row at the largest `y`.
pub fn write_pgm16(path: impl AsRef<Path>, img: &ImageGrid) -> Result<PgmScaling> {
    let scaling = PgmScaling::for_image(img);
    let n = img.spec().n_px;
    let mut out = format!("P5\n{n} {n}\n{}\n", scaling.max_gray).into_bytes();
    out.reserve(2 * n * n);
    for row in (0..n).rev() {
        for col in 0..n {
            out.extend_from_slice(&scaling.gray(img.get(row, col)).to_be_bytes());
        }
    }
    std::fs::write(path, out)?;
    Ok(scaling)
}

/// One-row CSV recording how gray levels map back to values.
pub fn write_scaling_csv(path: impl AsRef<Path>, scaling: &PgmScaling) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "min,max,max_gray")?;
    writeln!(
        f,
        "{:e},{:e},{}",
        scaling.min, scaling.max, scaling.max_gray
    )?;
    Ok(())
}
