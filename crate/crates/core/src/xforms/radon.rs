//! Parallel-beam Radon projection, backprojection and filtered backprojection.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::Result;
use crate::geometry::{interpolate_row, GridSpec, ImageGrid, RadonSinogram};

/// Line integrals of a raster, sampled bilinearly every half pixel.
pub fn radon_forward_grid(
    image: &ImageGrid,
    n_theta: usize,
    n_s: usize,
    s_max: f64,
) -> Result<RadonSinogram> {
    let mut sino = RadonSinogram::zeros(n_theta, n_s, s_max)?;
    let spec = *image.spec();
    let step = spec.pixel_size() / 2.0;
    let reach = spec.half_extent * SQRT_2 + spec.pixel_size();
    let n_t = (2.0 * reach / step).ceil() as usize;
    let thetas: Vec<f64> = (0..n_theta).map(|j| sino.theta(j)).collect();
    let offsets: Vec<f64> = (0..n_s).map(|i| sino.s(i)).collect();
    sino.values_mut()
        .par_chunks_mut(n_s)
        .enumerate()
        .for_each(|(j, row)| {
            let (ws, wc) = thetas[j].sin_cos();
            // omega = (ws, wc), along-line direction omega_perp = (wc, -ws)
            let t0 = spec.center[0] * wc - spec.center[1] * ws - reach;
            for (i, out) in row.iter_mut().enumerate() {
                let s = offsets[i];
                let mut acc = 0.0;
                for k in 0..n_t {
                    let t = t0 + (k as f64 + 0.5) * step;
                    acc += image.sample_bilinear([s * ws + t * wc, s * wc - t * ws]);
                }
                *out = acc * step;
            }
        });
    Ok(sino)
}

/// `R^# g(u) = int_{S^1} g(omega, u . omega) d omega`, using evenness to fold
/// the full circle onto the `[0, pi)` lattice. Linear interpolation in `s`;
/// offsets beyond `S` contribute zero.
pub fn backprojection(sino: &RadonSinogram, spec: GridSpec) -> ImageGrid {
    let n = spec.n_px;
    let trig: Vec<(f64, f64)> = (0..sino.n_theta())
        .map(|j| sino.theta(j).sin_cos())
        .collect();
    let weight = 2.0 * PI / sino.n_theta() as f64;
    let (s_max, ds) = (sino.s_max(), sino.ds());
    let mut values = vec![0.0; spec.len()];
    values.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
        for (col, v) in out.iter_mut().enumerate() {
            let u = spec.pixel_center(row, col);
            let mut acc = 0.0;
            for (j, (ws, wc)) in trig.iter().enumerate() {
                acc += interpolate_row(sino.row(j), s_max, ds, u[0] * ws + u[1] * wc);
            }
            *v = acc * weight;
        }
    });
    ImageGrid::from_values(spec, values).expect("backprojection of finite data is finite")
}

/// Fraction of the band (from the top) rolled off by the cosine taper.
const RAMP_TAPER: f64 = 0.1;

/// Frequency response of the band-limited ramp `|sigma|` (angular frequency)
/// for a padded length `len` and sample spacing `ds`.
///
/// Built as the DFT of the sampled band-limited ramp kernel so that the zero
/// mode carries the correct (small positive) value instead of exactly zero.
pub fn ramp_response(len: usize, ds: f64) -> Vec<f64> {
    let mut kernel = vec![Complex::new(0.0, 0.0); len];
    kernel[0].re = 1.0 / (4.0 * ds * ds);
    for k in 1..=len / 2 {
        if k % 2 == 1 {
            let v = -1.0 / (PI * PI * (k * k) as f64 * ds * ds);
            kernel[k].re = v;
            kernel[len - k].re = v;
        }
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut kernel);
    (0..len)
        .map(|m| {
            let freq = m.min(len - m) as f64 / (len as f64 / 2.0); // 1 at Nyquist
            let taper = if freq <= 1.0 - RAMP_TAPER {
                1.0
            } else {
                0.5 * (1.0 + (PI * (freq - (1.0 - RAMP_TAPER)) / RAMP_TAPER).cos())
            };
            2.0 * PI * ds * kernel[m].re * taper
        })
        .collect()
}

/// Applies the ramp filter to every projection of `sino`.
pub fn ramp_filter(sino: &RadonSinogram) -> RadonSinogram {
    let n_s = sino.n_s();
    let len = (2 * n_s).next_power_of_two();
    let ds = sino.ds();
    let response = ramp_response(len, ds);
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut out = sino.clone();
    out.values_mut().par_chunks_mut(n_s).for_each(|row| {
        let mut buf: Vec<Complex<f64>> = row
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
            .take(len)
            .collect();
        fwd.process(&mut buf);
        buf.iter_mut().zip(&response).for_each(|(b, r)| *b *= *r);
        inv.process(&mut buf);
        let scale = 1.0 / len as f64;
        row.iter_mut()
            .zip(&buf)
            .for_each(|(v, b)| *v = b.re * scale);
    });
    out
}

/// `f = (1/2)(2 pi)^{-1} R^# I^{-1} R f` for planar data: ramp filter along
/// `s`, backproject, scale by `1 / (4 pi)`.
pub fn fbp_radon_inversion(sino: &RadonSinogram, spec: GridSpec) -> ImageGrid {
    let filtered = ramp_filter(sino);
    let mut image = backprojection(&filtered, spec);
    image.scale(1.0 / (4.0 * PI));
    image
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction2;
    use crate::phantom::Phantom;

    fn analytic_sinogram(p: &Phantom, n_theta: usize, n_s: usize, s_max: f64) -> RadonSinogram {
        let mut sino = RadonSinogram::zeros(n_theta, n_s, s_max).unwrap();
        let (thetas, offsets): (Vec<f64>, Vec<f64>) = (
            (0..n_theta).map(|j| sino.theta(j)).collect(),
            (0..n_s).map(|i| sino.s(i)).collect(),
        );
        for (j, row) in sino.values_mut().chunks_mut(n_s).enumerate() {
            for (i, v) in row.iter_mut().enumerate() {
                *v = p.radon_analytic(Direction2::new(thetas[j]), offsets[i]);
            }
        }
        sino
    }

    #[test]
    fn forward_projection_of_raster_matches_analytic() {
        let p = Phantom::centered_disk();
        let spec = GridSpec::new(128, 1.0).unwrap();
        let sino = radon_forward_grid(&p.rasterize(spec), 12, 65, 1.5).unwrap();
        let mid = 32;
        assert!(sino.s(mid).abs() < 1e-12);
        for j in 0..12 {
            assert!(
                (sino.get(j, mid) - 1.0).abs() < 0.01,
                "{}",
                sino.get(j, mid)
            );
        }
    }

    #[test]
    fn forward_projection_of_zero_image_is_zero() {
        let spec = GridSpec::new(16, 1.0).unwrap();
        let sino = radon_forward_grid(&ImageGrid::zeros(spec), 8, 9, 1.5).unwrap();
        assert!(sino.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn forward_projection_follows_a_pixel_shift() {
        let spec = GridSpec::new(128, 1.0).unwrap();
        let h = spec.pixel_size();
        let p = Phantom::gaussian([0.1, 0.0], 0.15, 1.0).unwrap();
        let shifted = p.translated([h, 0.0]);
        let sino = radon_forward_grid(&shifted.rasterize(spec), 6, 129, 1.5).unwrap();
        for j in 0..6 {
            let w = Direction2::new(sino.theta(j));
            for i in (20..110).step_by(7) {
                let exact = shifted.radon_analytic(w, sino.s(i));
                assert!(
                    (sino.get(j, i) - exact).abs() < 3e-3,
                    "{} vs {exact}",
                    sino.get(j, i)
                );
            }
        }
    }

    #[test]
    fn backprojection_of_centered_disk() {
        let p = Phantom::centered_disk();
        let sino = analytic_sinogram(&p, 180, 201, 1.5);
        let spec = GridSpec::new(5, 1.0).unwrap();
        let bp = backprojection(&sino, spec);
        assert!((bp.get(2, 2) - 2.0 * PI).abs() < 1e-10);
        let zero = backprojection(&RadonSinogram::zeros(4, 5, 1.0).unwrap(), spec);
        assert!(zero.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn backprojection_is_riesz_convolution() {
        // R^# R f(u) = |S^0| (|x|^{-1} * f)(u); for a Gaussian the convolution
        // is a 1D radial quadrature: 2 int_0^{2pi} int_0^inf f(u + r w) dr dw
        let p = Phantom::gaussian([0.1, -0.05], 0.2, 1.0).unwrap();
        let sino = analytic_sinogram(&p, 360, 1201, 2.0);
        let spec = GridSpec::new(5, 0.5).unwrap();
        let bp = backprojection(&sino, spec);
        for (row, col) in [(0, 0), (2, 2), (1, 3), (4, 1), (3, 3)] {
            let u = spec.pixel_center(row, col);
            let n_w = 720;
            let mut conv = 0.0;
            for k in 0..n_w {
                let w = Direction2::new(2.0 * PI * k as f64 / n_w as f64).unit_vector();
                let dr = 1e-3;
                conv += (0..3000)
                    .map(|i| {
                        let r = (i as f64 + 0.5) * dr;
                        p.eval([u[0] + r * w[0], u[1] + r * w[1]])
                    })
                    .sum::<f64>()
                    * dr;
            }
            conv *= 2.0 * PI / n_w as f64;
            let got = bp.get(row, col);
            assert!(
                (got - 2.0 * conv).abs() < 1e-4 * got,
                "{got} vs {}",
                2.0 * conv
            );
        }
    }

    #[test]
    fn ramp_response_is_ramp_below_taper() {
        let len = 256;
        let ds = 0.01;
        let r = ramp_response(len, ds);
        assert!(r[0] > 0.0 && r[0] < 2.0 * PI / (len as f64 * ds));
        for m in [10usize, 50, 100] {
            let sigma = 2.0 * PI * m as f64 / (len as f64 * ds);
            assert!((r[m] - sigma).abs() < 0.02 * sigma, "{} vs {sigma}", r[m]);
            assert!((r[len - m] - r[m]).abs() < 1e-9 * r[m]);
        }
        assert!(r[len / 2].abs() < 1e-9);
    }

    #[test]
    fn fbp_recovers_disk_plateau() {
        let p = Phantom::centered_disk();
        let sino = analytic_sinogram(&p, 360, 365, 1.42);
        let spec = GridSpec::new(128, 1.0).unwrap();
        let rec = fbp_radon_inversion(&sino, spec);
        let h = spec.pixel_size();
        let mut n = 0;
        let mut sum = 0.0;
        for row in 0..128 {
            for col in 0..128 {
                let c = spec.pixel_center(row, col);
                if (c[0] * c[0] + c[1] * c[1]).sqrt() < 0.5 - 3.0 * h {
                    sum += rec.get(row, col);
                    n += 1;
                    assert!((rec.get(row, col) - 1.0).abs() < 0.05);
                }
            }
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.01);
    }

    #[test]
    fn fbp_of_zero_is_zero() {
        let spec = GridSpec::new(16, 1.0).unwrap();
        let rec = fbp_radon_inversion(&RadonSinogram::zeros(10, 33, 1.5).unwrap(), spec);
        assert!(rec.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn fbp_of_gaussian_within_two_percent() {
        let p = Phantom::gaussian([0.0, 0.0], 0.2, 1.0).unwrap();
        let spec = GridSpec::new(256, 1.0).unwrap();
        let sino = analytic_sinogram(&p, 360, 363, 1.42);
        let rec = fbp_radon_inversion(&sino, spec);
        let err = rec.rel_l2_error(&p.rasterize(spec));
        assert!(err < 0.02, "rel l2 {err}");
    }
}
