use std::path::Path;

use super::{format_err, push_f64s, push_u32, Reader};
use crate::geometry::{beta_angle, psi_midpoint, ConeSinogram, RadonSinogram};
use crate::Result;

pub const CONE_MAGIC: &[u8; 8] = b"CONESG01";
pub const RADON_MAGIC: &[u8; 8] = b"RADSG001";

/// Header, lattice origin and step for axis and opening, vertices, then values
/// vertex-major, axis-middle, opening-minor.
pub fn write_cone_sinogram(path: impl AsRef<Path>, data: &ConeSinogram) -> Result<()> {
    let (nb, np) = (data.n_beta(), data.n_psi());
    let mut out =
        Vec::with_capacity(8 + 12 + 32 + 8 * (2 * data.vertices().len() + data.values().len()));
    out.extend_from_slice(CONE_MAGIC);
    push_u32(&mut out, data.vertices().len())?;
    push_u32(&mut out, nb)?;
    push_u32(&mut out, np)?;
    push_f64s(
        &mut out,
        &[
            0.0,
            beta_angle(1, nb),
            psi_midpoint(0, np),
            std::f64::consts::PI / np as f64,
        ],
    );
    for v in data.vertices() {
        push_f64s(&mut out, v);
    }
    push_f64s(&mut out, data.values());
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a cone sinogram, rejecting lattices other than the uniform axis
/// lattice from 0 and the midpoint opening lattice.
pub fn read_cone_sinogram(path: impl AsRef<Path>) -> Result<ConeSinogram> {
    let bytes = std::fs::read(path)?;
    let mut r = Reader::new(&bytes);
    if r.take(8)? != CONE_MAGIC {
        return Err(format_err("not a cone sinogram (bad magic)"));
    }
    let n_vertices = r.u32()? as usize;
    let nb = r.u32()? as usize;
    let np = r.u32()? as usize;
    if nb == 0 || np == 0 {
        return Err(format_err("cone sinogram lattice is empty"));
    }
    let lattice = [r.f64()?, r.f64()?, r.f64()?, r.f64()?];
    let expected = [
        0.0,
        beta_angle(1, nb),
        psi_midpoint(0, np),
        std::f64::consts::PI / np as f64,
    ];
    if lattice
        .iter()
        .zip(&expected)
        .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(format_err(format!(
            "unsupported angular lattice {lattice:?}, expected {expected:?}"
        )));
    }
    let coords = r.f64s(2 * n_vertices)?;
    let vertices = coords.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
    let len = n_vertices
        .checked_mul(nb)
        .and_then(|v| v.checked_mul(np))
        .ok_or_else(|| format_err("cone sinogram size overflows"))?;
    let values = r.f64s(len)?;
    r.finish()?;
    ConeSinogram::from_values(vertices, nb, np, values)
}

/// Header with the offset range `S`, then values angle-major.
pub fn write_radon_sinogram(path: impl AsRef<Path>, sino: &RadonSinogram) -> Result<()> {
    let mut out = Vec::with_capacity(24 + 8 * sino.values().len());
    out.extend_from_slice(RADON_MAGIC);
    push_u32(&mut out, sino.n_theta())?;
    push_u32(&mut out, sino.n_s())?;
    push_f64s(&mut out, &[sino.s_max()]);
    push_f64s(&mut out, sino.values());
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_radon_sinogram(path: impl AsRef<Path>) -> Result<RadonSinogram> {
    let bytes = std::fs::read(path)?;
    let mut r = Reader::new(&bytes);
    if r.take(8)? != RADON_MAGIC {
        return Err(format_err("not a radon sinogram (bad magic)"));
    }
    let n_theta = r.u32()? as usize;
    let n_s = r.u32()? as usize;
    let s_max = r.f64()?;
    let len = n_theta
        .checked_mul(n_s)
        .ok_or_else(|| format_err("radon sinogram size overflows"))?;
    let values = r.f64s(len)?;
    r.finish()?;
    RadonSinogram::from_values(n_theta, n_s, s_max, values)
}
