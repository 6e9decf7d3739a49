//! Analytic phantoms: sums of uniform disks and isotropic Gaussians.
//!
//! Every projection used elsewhere (rays, Radon lines, 2D cones) has a closed
//! form here, which makes the phantoms exact oracles for the transforms.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::error::{config, domain, Result};
use crate::geometry::{rotate_point, Direction2, GridSpec, ImageGrid, Point2, RadonSinogram};

/// Uniform disk (indicator times density).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
    pub density: f64,
}

/// `amplitude * exp(-|x - center|^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBlob {
    pub center: Point2,
    pub sigma: f64,
    pub amplitude: f64,
}

impl Disk {
    pub fn new(center: Point2, radius: f64, density: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(config(format!("disk radius {radius} must be positive")));
        }
        Ok(Self {
            center,
            radius,
            density,
        })
    }

    fn eval(&self, x: Point2) -> f64 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        if dx * dx + dy * dy < self.radius * self.radius {
            self.density
        } else {
            0.0
        }
    }

    /// Parameter interval `[r_in, r_out]` (clipped to `r >= 0`) of the ray
    /// inside the disk, if any. Tangent rays give nothing.
    fn ray_interval(&self, origin: Point2, dir: Point2) -> Option<(f64, f64)> {
        let ox = origin[0] - self.center[0];
        let oy = origin[1] - self.center[1];
        let b = dir[0] * ox + dir[1] * oy;
        let perp = dir[0] * oy - dir[1] * ox;
        let disc = self.radius * self.radius - perp * perp;
        if disc <= 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let (r1, r2) = (-b - sq, -b + sq);
        if r2 <= 0.0 {
            return None;
        }
        Some((r1.max(0.0), r2))
    }

    fn ray_integral(&self, origin: Point2, dir: Point2) -> f64 {
        match self.ray_interval(origin, dir) {
            Some((lo, hi)) => self.density * (hi - lo),
            None => 0.0,
        }
    }

    fn radon(&self, omega: Point2, s: f64) -> f64 {
        let d = s - (omega[0] * self.center[0] + omega[1] * self.center[1]);
        let disc = self.radius * self.radius - d * d;
        if disc > 0.0 {
            2.0 * self.density * disc.sqrt()
        } else {
            0.0
        }
    }
}

impl GaussianBlob {
    pub fn new(center: Point2, sigma: f64, amplitude: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(config(format!("gaussian sigma {sigma} must be positive")));
        }
        Ok(Self {
            center,
            sigma,
            amplitude,
        })
    }

    fn eval(&self, x: Point2) -> f64 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        self.amplitude * (-(dx * dx + dy * dy) / (2.0 * self.sigma * self.sigma)).exp()
    }

    fn ray_integral(&self, origin: Point2, dir: Point2) -> f64 {
        let ox = origin[0] - self.center[0];
        let oy = origin[1] - self.center[1];
        let b = dir[0] * ox + dir[1] * oy;
        let perp = dir[0] * oy - dir[1] * ox;
        let s2 = self.sigma * self.sigma;
        self.amplitude
            * (-perp * perp / (2.0 * s2)).exp()
            * self.sigma
            * (PI / 2.0).sqrt()
            * erfc(b / (self.sigma * SQRT_2))
    }

    fn radon(&self, omega: Point2, s: f64) -> f64 {
        let d = s - (omega[0] * self.center[0] + omega[1] * self.center[1]);
        self.amplitude
            * self.sigma
            * (2.0 * PI).sqrt()
            * (-d * d / (2.0 * self.sigma * self.sigma)).exp()
    }

    /// Distance beyond which the blob is below `exp(-36)` of its peak.
    fn effective_radius(&self) -> f64 {
        8.5 * self.sigma
    }
}

/// Superposition of disks and Gaussian blobs; overlapping densities add.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Phantom {
    pub disks: Vec<Disk>,
    pub blobs: Vec<GaussianBlob>,
}

impl Phantom {
    pub fn new(disks: Vec<Disk>, blobs: Vec<GaussianBlob>) -> Self {
        Self { disks, blobs }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Unit-density disk of radius 0.5 at the origin.
    pub fn centered_disk() -> Self {
        Self::new(
            vec![Disk {
                center: [0.0, 0.0],
                radius: 0.5,
                density: 1.0,
            }],
            vec![],
        )
    }

    /// Disks of density 0.3 (radius 0.5 at the origin) and 0.7 (radius 0.3 at
    /// `(0.5, 0)`); the lens where they overlap has density 1.0.
    pub fn overlapping_disks() -> Self {
        Self::new(
            vec![
                Disk {
                    center: [0.0, 0.0],
                    radius: 0.5,
                    density: 0.3,
                },
                Disk {
                    center: [0.5, 0.0],
                    radius: 0.3,
                    density: 0.7,
                },
            ],
            vec![],
        )
    }

    pub fn gaussian(center: Point2, sigma: f64, amplitude: f64) -> Result<Self> {
        Ok(Self::new(
            vec![],
            vec![GaussianBlob::new(center, sigma, amplitude)?],
        ))
    }

    /// Random phantom driven by a uniform `[0, 1)` sampler: one to three
    /// disks and up to two Gaussians, all inside `[-0.6, 0.6]^2`.
    pub fn random_with(mut uniform: impl FnMut() -> f64) -> Self {
        let mut lerp = |lo: f64, hi: f64| lo + (hi - lo) * uniform();
        let n_disks = 1 + (lerp(0.0, 3.0) as usize).min(2);
        let n_blobs = (lerp(0.0, 3.0) as usize).min(2);
        let mut disks = Vec::with_capacity(n_disks);
        for _ in 0..n_disks {
            let radius = lerp(0.1, 0.35);
            let reach = 0.6 - radius;
            disks.push(Disk {
                center: [lerp(-reach, reach), lerp(-reach, reach)],
                radius,
                density: lerp(0.2, 1.0),
            });
        }
        let mut blobs = Vec::with_capacity(n_blobs);
        for _ in 0..n_blobs {
            blobs.push(GaussianBlob {
                center: [lerp(-0.3, 0.3), lerp(-0.3, 0.3)],
                sigma: lerp(0.08, 0.2),
                amplitude: lerp(0.2, 1.0),
            });
        }
        Self { disks, blobs }
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty() && self.blobs.is_empty()
    }

    pub fn eval(&self, x: Point2) -> f64 {
        self.disks.iter().map(|d| d.eval(x)).sum::<f64>()
            + self.blobs.iter().map(|g| g.eval(x)).sum::<f64>()
    }

    /// Radius around `p` outside of which the phantom is (numerically) zero.
    pub fn reach_from(&self, p: Point2) -> f64 {
        let dist = |c: Point2| ((c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2)).sqrt();
        let disks = self.disks.iter().map(|d| dist(d.center) + d.radius);
        let blobs = self
            .blobs
            .iter()
            .map(|g| dist(g.center) + g.effective_radius());
        disks.chain(blobs).fold(0.0, f64::max)
    }

    /// Point samples at pixel centers.
    pub fn sample_centers(&self, spec: GridSpec) -> ImageGrid {
        let n = spec.n_px;
        let mut values = vec![0.0; spec.len()];
        values.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
            for (col, v) in out.iter_mut().enumerate() {
                *v = self.eval(spec.pixel_center(row, col));
            }
        });
        ImageGrid::from_values(spec, values).expect("sampled values are finite")
    }

    /// Each pixel is the mean over a 4 x 4 sub-pixel lattice.
    pub fn rasterize(&self, spec: GridSpec) -> ImageGrid {
        const SUB: usize = 4;
        let h = spec.pixel_size();
        let n = spec.n_px;
        let mut values = vec![0.0; spec.len()];
        values.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
            for (col, v) in out.iter_mut().enumerate() {
                let c = spec.pixel_center(row, col);
                let mut acc = 0.0;
                for a in 0..SUB {
                    for b in 0..SUB {
                        let ox = ((b as f64 + 0.5) / SUB as f64 - 0.5) * h;
                        let oy = ((a as f64 + 0.5) / SUB as f64 - 0.5) * h;
                        acc += self.eval([c[0] + ox, c[1] + oy]);
                    }
                }
                *v = acc / (SUB * SUB) as f64;
            }
        });
        ImageGrid::from_values(spec, values).expect("rasterized values are finite")
    }

    /// `int_0^inf f(origin + r dir) dr`, exact.
    pub fn ray_integral(&self, origin: Point2, dir: Direction2) -> f64 {
        self.ray_integral_vec(origin, dir.unit_vector())
    }

    pub(crate) fn ray_integral_vec(&self, origin: Point2, dir: Point2) -> f64 {
        self.disks
            .iter()
            .map(|d| d.ray_integral(origin, dir))
            .sum::<f64>()
            + self
                .blobs
                .iter()
                .map(|g| g.ray_integral(origin, dir))
                .sum::<f64>()
    }

    /// Parameters `r > 0` at which `r -> f(origin + r dir)` jumps.
    pub fn ray_breakpoints(&self, origin: Point2, dir: Point2) -> Vec<f64> {
        let mut out = Vec::new();
        for d in &self.disks {
            if let Some((lo, hi)) = d.ray_interval(origin, dir) {
                if lo > 0.0 {
                    out.push(lo);
                }
                out.push(hi);
            }
        }
        out
    }

    /// Angular distance from the normal angle `phi` to the nearest normal of a
    /// line through `u` tangent to a disk boundary, modulo `pi`.
    ///
    /// Line integrals through `u` have square-root edges at those angles.
    /// Disks containing `u` have no tangent line through it; Gaussians have no
    /// edges. Returns infinity when there is no tangency.
    pub fn tangent_distance(&self, u: Point2, phi: f64) -> f64 {
        let mut best = f64::INFINITY;
        for d in &self.disks {
            let r = [u[0] - d.center[0], u[1] - d.center[1]];
            let dist = r[0].hypot(r[1]);
            if dist <= d.radius {
                continue;
            }
            // omega(phi) . r = dist cos(phi - axis)
            let axis = r[0].atan2(r[1]);
            let half = (d.radius / dist).acos();
            for edge in [axis + half, axis - half] {
                let x = (phi - edge).rem_euclid(PI);
                best = best.min(x.min(PI - x));
            }
        }
        best
    }

    /// `Rf(omega, s)`: integral over the line `x . omega = s`, exact.
    pub fn radon_analytic(&self, omega: Direction2, s: f64) -> f64 {
        self.radon_vec(omega.unit_vector(), s)
    }

    /// Exact line integrals on the lattice of an `n_theta x n_s` sinogram.
    pub fn radon_sinogram(&self, n_theta: usize, n_s: usize, s_max: f64) -> Result<RadonSinogram> {
        let mut sino = RadonSinogram::zeros(n_theta, n_s, s_max)?;
        let lattice = sino.clone();
        sino.values_mut()
            .par_chunks_mut(n_s)
            .enumerate()
            .for_each(|(j, row)| {
                let omega = Direction2::new(lattice.theta(j)).unit_vector();
                for (i, v) in row.iter_mut().enumerate() {
                    *v = self.radon_vec(omega, lattice.s(i));
                }
            });
        Ok(sino)
    }

    pub(crate) fn radon_vec(&self, omega: Point2, s: f64) -> f64 {
        self.disks.iter().map(|d| d.radon(omega, s)).sum::<f64>()
            + self.blobs.iter().map(|g| g.radon(omega, s)).sum::<f64>()
    }

    /// 2D cone (V-line) transform: the two rays from `u` with directions
    /// `unit_vector(phi + psi)` and `unit_vector(phi - psi)`.
    pub fn cone_analytic_2d(&self, u: Point2, phi: f64, psi: f64) -> Result<f64> {
        if !(psi > 0.0 && psi < PI) {
            return Err(domain(format!("opening angle {psi} not in (0, pi)")));
        }
        Ok(self.cone_value(u, phi, psi))
    }

    /// Unchecked variant of [`Phantom::cone_analytic_2d`] for lattice loops.
    pub(crate) fn cone_value(&self, u: Point2, phi: f64, psi: f64) -> f64 {
        let (s1, c1) = (phi + psi).sin_cos();
        let (s2, c2) = (phi - psi).sin_cos();
        self.ray_integral_vec(u, [s1, c1]) + self.ray_integral_vec(u, [s2, c2])
    }

    pub fn translated(&self, a: Point2) -> Self {
        let shift = |c: Point2| [c[0] + a[0], c[1] + a[1]];
        Self {
            disks: self
                .disks
                .iter()
                .map(|d| Disk {
                    center: shift(d.center),
                    ..*d
                })
                .collect(),
            blobs: self
                .blobs
                .iter()
                .map(|g| GaussianBlob {
                    center: shift(g.center),
                    ..*g
                })
                .collect(),
        }
    }

    /// Rotation with the same convention as [`rotate_point`].
    pub fn rotated(&self, alpha: f64) -> Self {
        Self {
            disks: self
                .disks
                .iter()
                .map(|d| Disk {
                    center: rotate_point(d.center, alpha),
                    ..*d
                })
                .collect(),
            blobs: self
                .blobs
                .iter()
                .map(|g| GaussianBlob {
                    center: rotate_point(g.center, alpha),
                    ..*g
                })
                .collect(),
        }
    }
}
