use std::f64::consts::PI;

use rayon::prelude::*;

use crate::cone::cone_forward_sinogram;
use crate::error::{config, Result};
use crate::geometry::{
    beta_angle, psi_midpoint, ConeSinogram, GridSpec, ImageGrid, Point2, RadonSinogram,
};
use crate::phantom::Phantom;
use crate::xforms::{
    beltrami_poly_apply_with, fbp_radon_inversion, funk_transform_s1, CircleFunction, LaplacianMode,
};

/// Detectors on the boundary of the square `center + [-A, A]^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraConfig {
    pub half_extent: f64,
    /// Detectors per side, corners included and shared between sides.
    pub per_side: usize,
    pub n_beta: usize,
    pub n_psi: usize,
    pub center: Point2,
}

impl CameraConfig {
    pub fn new(half_extent: f64, per_side: usize, n_beta: usize, n_psi: usize) -> Result<Self> {
        let cam = Self {
            half_extent,
            per_side,
            n_beta,
            n_psi,
            center: [0.0, 0.0],
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn with_center(self, center: Point2) -> Self {
        Self { center, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.per_side < 2 {
            return Err(config("camera needs at least 2 detectors per side"));
        }
        if !(self.half_extent > 0.0 && self.half_extent.is_finite()) {
            return Err(config("camera half extent must be positive"));
        }
        if self.n_beta == 0 || !self.n_beta.is_multiple_of(4) {
            return Err(config(format!(
                "n_beta = {} must be a positive multiple of 4",
                self.n_beta
            )));
        }
        if self.n_psi < 2 {
            return Err(config("camera needs n_psi >= 2"));
        }
        Ok(())
    }

    /// `4 (per_side - 1)` distinct positions, counter-clockwise from the
    /// corner `center + (-A, -A)`.
    pub fn detectors(&self) -> Vec<Point2> {
        let a = self.half_extent;
        let steps = self.per_side - 1;
        let corners = [[-a, -a], [a, -a], [a, a], [-a, a]];
        let mut out = Vec::with_capacity(4 * steps);
        for side in 0..4 {
            let p = corners[side];
            let q = corners[(side + 1) % 4];
            for i in 0..steps {
                let t = i as f64 / steps as f64;
                out.push([
                    self.center[0] + p[0] + t * (q[0] - p[0]),
                    self.center[1] + p[1] + t * (q[1] - p[1]),
                ]);
            }
        }
        out
    }
}

/// One recovered line integral: `Rf(omega(phi), s)` with `s = omega(phi) . u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadonSample {
    pub phi: f64,
    pub s: f64,
    pub value: f64,
}

/// Converts the cone data of one vertex (`n_beta x n_psi`, `psi` minor) to
/// Radon data on the lines through `u` with normals `omega(phi_j)`:
/// `Rf(omega, omega . u) = -2 int_0^pi P_1(Delta_S) F (Cf)(u, omega, psi) sin psi d psi`.
///
/// The opening integral is taken first; the circle operators are linear and
/// act on `omega` only.
pub fn cone_to_radon_even(
    block: &[f64],
    n_beta: usize,
    n_psi: usize,
    u: Point2,
) -> Result<Vec<RadonSample>> {
    cone_to_radon_even_with(block, n_beta, n_psi, u, LaplacianMode::FiniteDifference)
}

/// [`cone_to_radon_even`] with an explicit discretization of the circle Laplacian.
pub fn cone_to_radon_even_with(
    block: &[f64],
    n_beta: usize,
    n_psi: usize,
    u: Point2,
    mode: LaplacianMode,
) -> Result<Vec<RadonSample>> {
    if block.len() != n_beta * n_psi {
        return Err(config("cone block size does not match lattice"));
    }
    if !n_beta.is_multiple_of(4) {
        return Err(config(format!("n_beta = {n_beta} must be divisible by 4")));
    }
    let dpsi = PI / n_psi as f64;
    let weights: Vec<f64> = (0..n_psi)
        .map(|k| psi_midpoint(k, n_psi).sin() * dpsi)
        .collect();
    let integrated: Vec<f64> = block
        .chunks(n_psi)
        .map(|row| row.iter().zip(&weights).map(|(c, w)| c * w).sum())
        .collect();
    let g = CircleFunction::new(integrated)?;
    let radon = beltrami_poly_apply_with(&funk_transform_s1(&g)?, 2, 1, mode);
    Ok(radon
        .samples()
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let phi = beta_angle(j, n_beta);
            let (s, c) = phi.sin_cos();
            RadonSample {
                phi,
                s: s * u[0] + c * u[1],
                value: -2.0 * v,
            }
        })
        .collect())
}

/// Bookkeeping from assembling the Radon sinogram.
#[derive(Debug, Clone, PartialEq)]
pub struct BinningReport {
    pub n_detectors: usize,
    pub n_theta: usize,
    pub n_s: usize,
    pub samples: usize,
    /// Empty bins between the first and last filled bin of each projection,
    /// as a fraction of all bins in that covered span.
    pub interior_empty_fraction: f64,
    pub warning: Option<String>,
}

/// Interior empty fraction above which the camera counts as under-sampled.
pub const EMPTY_BIN_WARNING: f64 = 0.2;

#[derive(Debug, Clone)]
pub struct ComptonReconstruction {
    pub image: ImageGrid,
    pub sinogram: RadonSinogram,
    pub report: BinningReport,
}

/// Cone data at the camera detectors, then [`compton_reconstruct_from_data`].
pub fn compton_reconstruct(
    phantom: &Phantom,
    cam: &CameraConfig,
    spec: GridSpec,
) -> Result<ComptonReconstruction> {
    cam.validate()?;
    let data = cone_forward_sinogram(phantom, &cam.detectors(), cam.n_beta, cam.n_psi)?;
    compton_reconstruct_from_data(&data, cam, spec)
}

/// Offset range of the assembled sinogram: the circle circumscribing the camera.
fn radon_lattice(cam: &CameraConfig, spec: &GridSpec) -> (usize, usize, f64) {
    let s_max = cam.half_extent * std::f64::consts::SQRT_2;
    let half_bins = (s_max / spec.pixel_size()).ceil() as usize;
    (cam.n_beta / 2, 2 * half_bins + 1, s_max)
}

/// Converts every vertex of `data` to Radon samples, bins them (coordinates
/// relative to the camera center) and inverts with filtered backprojection.
///
/// Axis angles `phi_j` and `phi_j + pi` describe the same line with opposite
/// orientation, so samples are folded onto `theta in [0, pi)` with
/// `Rf(-omega, -s) = Rf(omega, s)`. With `n_theta = n_beta / 2` every folded
/// angle lands on the lattice, so the scatter is linear in `s` only.
pub fn compton_reconstruct_from_data(
    data: &ConeSinogram,
    cam: &CameraConfig,
    spec: GridSpec,
) -> Result<ComptonReconstruction> {
    cam.validate()?;
    if data.n_beta() != cam.n_beta || data.n_psi() != cam.n_psi {
        return Err(config(
            "cone data lattice does not match camera configuration",
        ));
    }
    let (n_theta, n_s, s_max) = radon_lattice(cam, &spec);
    let ds = 2.0 * s_max / (n_s - 1) as f64;
    let vertices = data.vertices();
    let converted: Vec<Vec<RadonSample>> = (0..vertices.len())
        .into_par_iter()
        .map(|v| {
            let u = vertices[v];
            let rel = [u[0] - cam.center[0], u[1] - cam.center[1]];
            cone_to_radon_even(data.block(v), data.n_beta(), data.n_psi(), rel)
        })
        .collect::<Result<_>>()?;

    // sequential merge in detector order keeps the sums deterministic
    let mut acc = vec![0.0; n_theta * n_s];
    let mut weight = vec![0.0; n_theta * n_s];
    let mut samples = 0;
    for per_detector in &converted {
        for (j, sample) in per_detector.iter().enumerate() {
            let (row, s) = if j < n_theta {
                (j, sample.s)
            } else {
                (j - n_theta, -sample.s)
            };
            let f = (s + s_max) / ds;
            if !(f >= 0.0 && f <= (n_s - 1) as f64) {
                continue;
            }
            let i0 = (f.floor() as usize).min(n_s - 2);
            let t = f - i0 as f64;
            let base = row * n_s;
            acc[base + i0] += (1.0 - t) * sample.value;
            weight[base + i0] += 1.0 - t;
            acc[base + i0 + 1] += t * sample.value;
            weight[base + i0 + 1] += t;
            samples += 1;
        }
    }

    let mut values = vec![0.0; n_theta * n_s];
    let (mut interior, mut empty) = (0usize, 0usize);
    for row in 0..n_theta {
        let w = &weight[row * n_s..(row + 1) * n_s];
        let a = &acc[row * n_s..(row + 1) * n_s];
        let out = &mut values[row * n_s..(row + 1) * n_s];
        let filled: Vec<usize> = (0..n_s).filter(|&i| w[i] > BIN_WEIGHT_FLOOR).collect();
        for &i in &filled {
            out[i] = a[i] / w[i];
        }
        for pair in filled.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            interior += hi - lo;
            for i in lo + 1..hi {
                let t = (i - lo) as f64 / (hi - lo) as f64;
                out[i] = (1.0 - t) * out[lo] + t * out[hi];
                empty += 1;
            }
        }
        if !filled.is_empty() {
            interior += 1;
        }
    }
    let interior_empty_fraction = if interior == 0 {
        1.0
    } else {
        empty as f64 / interior as f64
    };
    let warning = (interior_empty_fraction > EMPTY_BIN_WARNING).then(|| {
        let msg = format!(
            "{:.1}% of covered Radon bins had no samples; the camera is under-sampled for this grid",
            100.0 * interior_empty_fraction
        );
        log::warn!("{msg}");
        msg
    });
    let sinogram = RadonSinogram::from_values(n_theta, n_s, s_max, values)?;

    let local = GridSpec::centered_at(
        spec.n_px,
        spec.half_extent,
        [
            spec.center[0] - cam.center[0],
            spec.center[1] - cam.center[1],
        ],
    )?;
    let image = ImageGrid::from_values(spec, fbp_radon_inversion(&sinogram, local).into_values())?;
    Ok(ComptonReconstruction {
        image,
        sinogram,
        report: BinningReport {
            n_detectors: vertices.len(),
            n_theta,
            n_s,
            samples,
            interior_empty_fraction,
            warning,
        },
    })
}

/// Accumulated scatter weight below which a bin counts as empty.
const BIN_WEIGHT_FLOOR: f64 = 1e-9;
