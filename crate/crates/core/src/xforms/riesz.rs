//! Riesz potentials `I^alpha` on planar rasters, applied as the Fourier
//! multiplier `|xi|^{-alpha}`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{config, domain, Result};
use crate::geometry::{GridSpec, ImageGrid};

/// Order of a Riesz potential in `R^dim`; must satisfy `alpha < dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszOrder {
    alpha: f64,
    dim: usize,
}

impl RieszOrder {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if !alpha.is_finite() || alpha >= dim as f64 {
            return Err(domain(format!(
                "Riesz order {alpha} must be below the dimension {dim}"
            )));
        }
        Ok(Self { alpha, dim })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// How the raster is extended before the periodic FFT.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Padding {
    /// Treat the raster as one period.
    Periodic,
    /// Embed in a zero-filled raster `factor` times wider.
    Zero { factor: usize },
    /// Embed in a raster `factor` times wider whose exterior is filled with a
    /// multipole expansion (then zero padded by a further 2x) `sum_k r^{-1-k} (a_k cos k t + b_k sin k t)` fitted
    /// to the raster border. Suited to inputs that decay like a
    /// backprojection rather than vanish outside the raster.
    MultipoleTail { factor: usize },
}

impl Default for Padding {
    fn default() -> Self {
        Padding::Zero { factor: 2 }
    }
}

/// Relative tolerance on the mean for orders that need zero-mean input.
const MEAN_TOL: f64 = 1e-10;

/// `I^alpha` on a planar raster with the default 2x zero padding.
pub fn riesz_apply_2d(image: &ImageGrid, order: RieszOrder) -> Result<ImageGrid> {
    riesz_apply_2d_padded(image, order, Padding::default())
}

/// `I^alpha` on a planar raster with an explicit padding mode.
///
/// The zero mode is dropped for every nonzero order. For `alpha > 0` the
/// multiplier has a pole there, so the input must have zero mean.
/// `alpha = 0` is the identity.
pub fn riesz_apply_2d_padded(
    image: &ImageGrid,
    order: RieszOrder,
    padding: Padding,
) -> Result<ImageGrid> {
    if order.dim() != 2 {
        return Err(config("riesz_apply_2d needs a planar order"));
    }
    let alpha = order.alpha();
    if alpha == 0.0 {
        return Ok(image.clone());
    }
    let spec = *image.spec();
    let n = spec.n_px;
    let (factor, tail) = match padding {
        Padding::Periodic => (1, None),
        Padding::Zero { factor } => (factor, None),
        Padding::MultipoleTail { factor } => (factor, Some(fit_multipole(image)?)),
    };
    if factor == 0 {
        return Err(config("padding factor must be at least 1"));
    }
    if alpha > 0.0 {
        let sum: f64 = image.values().iter().sum();
        let mass: f64 = image.values().iter().map(|v| v.abs()).sum();
        if sum.abs() > MEAN_TOL * mass.max(f64::MIN_POSITIVE) {
            return Err(domain(
                "positive-order Riesz potential needs zero-mean input",
            ));
        }
    }

    // the tail itself is zero padded 2x so its periodic images stay apart
    let big = if tail.is_some() {
        2 * n * factor
    } else {
        n * factor
    };
    let offset = (big - n) / 2;
    let tail_lo = (big - n * factor) / 2;
    let tail_range = tail_lo..tail_lo + n * factor;
    let h = spec.pixel_size();
    let mut buf = vec![Complex::new(0.0, 0.0); big * big];
    buf.par_chunks_mut(big).enumerate().for_each(|(r, row)| {
        for (c, b) in row.iter_mut().enumerate() {
            let inside = (offset..offset + n).contains(&r) && (offset..offset + n).contains(&c);
            b.re = if inside {
                image.get(r - offset, c - offset)
            } else if let Some(coef) = tail
                .as_ref()
                .filter(|_| tail_range.contains(&r) && tail_range.contains(&c))
            {
                let x = (c as f64 - offset as f64 + 0.5) * h - spec.half_extent;
                let y = (r as f64 - offset as f64 + 0.5) * h - spec.half_extent;
                multipole_basis(x, y)
                    .iter()
                    .zip(coef)
                    .map(|(b, a)| b * a)
                    .sum()
            } else {
                0.0
            };
        }
    });

    fft_2d(&mut buf, big, false);
    let dk = 2.0 * PI / (big as f64 * h);
    let freq = |k: usize| -> f64 {
        let signed = if k <= big / 2 {
            k as f64
        } else {
            k as f64 - big as f64
        };
        signed * dk
    };
    buf.par_chunks_mut(big).enumerate().for_each(|(r, row)| {
        let ky = freq(r);
        for (c, b) in row.iter_mut().enumerate() {
            let kx = freq(c);
            let rho2 = kx * kx + ky * ky;
            *b = if rho2 == 0.0 {
                Complex::new(0.0, 0.0)
            } else {
                *b * rho2.powf(-alpha / 2.0)
            };
        }
    });
    fft_2d(&mut buf, big, true);

    let norm = 1.0 / (big * big) as f64;
    let mut out = vec![0.0; n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(r, row)| {
        for (c, v) in row.iter_mut().enumerate() {
            *v = buf[(r + offset) * big + c + offset].re * norm;
        }
    });
    ImageGrid::from_values(spec, out)
}

/// Highest angular order kept in the multipole tail.
const TAIL_ORDER: usize = 6;
/// Width in pixels of the border ring the tail is fitted to.
const TAIL_RING: usize = 2;

fn multipole_basis(x: f64, y: f64) -> [f64; 2 * TAIL_ORDER + 1] {
    let r = (x * x + y * y).sqrt();
    let t = y.atan2(x);
    let mut b = [0.0; 2 * TAIL_ORDER + 1];
    b[0] = 1.0 / r;
    for k in 1..=TAIL_ORDER {
        let decay = r.powi(-(k as i32) - 1);
        let (s, c) = (k as f64 * t).sin_cos();
        b[2 * k - 1] = c * decay;
        b[2 * k] = s * decay;
    }
    b
}

/// Least-squares multipole fit (about the raster center) to the outer ring.
fn fit_multipole(image: &ImageGrid) -> Result<Vec<f64>> {
    let spec: GridSpec = *image.spec();
    let n = spec.n_px;
    let ring = TAIL_RING.min(n / 2);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if r.min(c).min(n - 1 - r).min(n - 1 - c) >= ring {
                continue;
            }
            rows.extend_from_slice(&multipole_basis(spec.coordinate(c), spec.coordinate(r)));
            rhs.push(image.get(r, c));
        }
    }
    let cols = 2 * TAIL_ORDER + 1;
    let a = DMatrix::from_row_slice(rhs.len(), cols, &rows);
    let b = DVector::from_vec(rhs);
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| domain(format!("multipole tail fit failed: {e}")))?;
    Ok(coef.iter().copied().collect())
}

fn fft_2d(buf: &mut [Complex<f64>], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    buf.par_chunks_mut(n).for_each(|row| plan.process(row));
    let mut t = transpose(buf, n);
    t.par_chunks_mut(n).for_each(|row| plan.process(row));
    buf.copy_from_slice(&transpose(&t, n));
}

fn transpose(buf: &[Complex<f64>], n: usize) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(c, row)| {
        for (r, v) in row.iter_mut().enumerate() {
            *v = buf[r * n + c];
        }
    });
    out
}
