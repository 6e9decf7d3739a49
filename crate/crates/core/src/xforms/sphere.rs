//! Operators on functions sampled on the unit circle.

use std::f64::consts::{PI, TAU};

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{config, domain, Result};
use crate::geometry::{beta_angle, sphere_area};
use crate::quadrature::adaptive_simpson;

/// Samples `f(phi_j)` at `phi_j = 2 pi j / M`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunction {
    samples: Vec<f64>,
}

/// Which member of a degree-`m` circular harmonic pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Harmonic {
    Cos,
    Sin,
}

impl CircleFunction {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        let m = samples.len();
        if m < 8 || !m.is_multiple_of(2) {
            return Err(config(format!(
                "circle lattice size {m} must be even and at least 8"
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(domain("circle samples must be finite"));
        }
        Ok(Self { samples })
    }

    pub fn from_fn(len: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..len).map(|j| f(beta_angle(j, len))).collect())
    }

    /// `cos(m phi)` or `sin(m phi)` on a lattice of `len` points.
    pub fn harmonic(len: usize, m: usize, kind: Harmonic) -> Result<Self> {
        let m = m as f64;
        match kind {
            Harmonic::Cos => Self::from_fn(len, |phi| (m * phi).cos()),
            Harmonic::Sin => Self::from_fn(len, |phi| (m * phi).sin()),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn angle(&self, j: usize) -> f64 {
        beta_angle(j, self.len())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Largest pointwise deviation from `other`.
    pub fn max_abs_diff(&self, other: &CircleFunction) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn map_indexed(&self, f: impl Fn(usize) -> f64) -> Self {
        Self {
            samples: (0..self.len()).map(f).collect(),
        }
    }
}

/// Trapezoid weights on `panels + 1` equispaced nodes (unit spacing) with
/// Gregory end corrections through fifth differences, sixth order for
/// smooth integrands. Needs at least 12 panels.
fn gregory_weights(panels: usize) -> Vec<f64> {
    const ENDS: [f64; 6] = [
        19087.0 / 60480.0,
        84199.0 / 60480.0,
        18869.0 / 30240.0,
        37621.0 / 30240.0,
        55031.0 / 60480.0,
        61343.0 / 60480.0,
    ];
    let mut w = vec![1.0; panels + 1];
    for (k, e) in ENDS.iter().enumerate() {
        w[k] = *e;
        w[panels - k] = *e;
    }
    w
}

/// `(c f)(omega) = |S^1|^{-1} int_{S^1} f(sigma) |sigma . omega| d sigma`.
///
/// The kernel has kinks where `sigma` is orthogonal to `omega`; those land on
/// lattice nodes when `M` is divisible by 4, so for `M >= 24` each smooth half-circle is
/// integrated with a Gregory-corrected trapezoid rule. Other sizes fall back to
/// the plain periodic trapezoid, which is only second order.
pub fn cosine_transform_s1(f: &CircleFunction) -> CircleFunction {
    let len = f.len();
    let h = TAU / len as f64;
    let samples = f.samples();
    let kernel: Vec<f64> = (0..len).map(|k| (k as f64 * h).cos().abs()).collect();
    if !len.is_multiple_of(4) || len < 24 {
        return f.map_indexed(|j| {
            (0..len)
                .map(|k| samples[k] * kernel[(len + k - j) % len])
                .sum::<f64>()
                / len as f64
        });
    }
    let half = len / 2;
    let weights = gregory_weights(half);
    f.map_indexed(|j| {
        let start = j + len / 4;
        let mut acc = 0.0;
        for piece in 0..2 {
            for (i, w) in weights.iter().enumerate() {
                let k = (start + piece * half + i) % len;
                acc += w * samples[k] * kernel[(len + k - j) % len];
            }
        }
        acc / len as f64
    })
}

/// `(F f)(theta) = (f(theta + pi/2) + f(theta - pi/2)) / 2`.
pub fn funk_transform_s1(f: &CircleFunction) -> Result<CircleFunction> {
    let len = f.len();
    if !len.is_multiple_of(4) {
        return Err(config(format!(
            "Funk transform needs a lattice divisible by 4, got {len}"
        )));
    }
    let q = len / 4;
    let s = f.samples();
    Ok(f.map_indexed(|j| 0.5 * (s[(j + q) % len] + s[(j + len - q) % len])))
}

/// How the Laplace–Beltrami operator is discretised.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianMode {
    /// Fourier multiplier `-m^2`, keeping modes with `|m| <= cutoff`.
    Spectral { cutoff: usize },
    /// Fourth-order five-point second difference.
    FiniteDifference,
}

/// Multiplier of `P_r(Delta_S) = 4^{-r} prod_{k<r} [-Delta_S + (2k-1)(n-1-2k)]`
/// on circular frequency `m`.
pub fn beltrami_poly_multiplier(m: usize, n: usize, r: usize) -> f64 {
    let m2 = (m * m) as f64;
    let nf = n as f64;
    (0..r)
        .map(|k| {
            let k = k as f64;
            (m2 + (2.0 * k - 1.0) * (nf - 1.0 - 2.0 * k)) / 4.0
        })
        .product()
}

/// `P_r(Delta_S) f` with the spectral Laplacian cut at `M / 4`.
pub fn beltrami_poly_apply(f: &CircleFunction, n: usize, r: usize) -> CircleFunction {
    beltrami_poly_apply_with(
        f,
        n,
        r,
        LaplacianMode::Spectral {
            cutoff: f.len() / 4,
        },
    )
}

pub fn beltrami_poly_apply_with(
    f: &CircleFunction,
    n: usize,
    r: usize,
    mode: LaplacianMode,
) -> CircleFunction {
    match mode {
        LaplacianMode::Spectral { cutoff } => {
            apply_circle_multiplier(f, cutoff, |m| beltrami_poly_multiplier(m, n, r))
        }
        LaplacianMode::FiniteDifference => {
            let len = f.len();
            let h = TAU / len as f64;
            let nf = n as f64;
            let mut cur = f.clone();
            for k in 0..r {
                let shift = (2.0 * k as f64 - 1.0) * (nf - 1.0 - 2.0 * k as f64);
                let s = cur.samples().to_vec();
                let at = |i: isize| s[i.rem_euclid(len as isize) as usize];
                cur = cur.map_indexed(|j| {
                    let j = j as isize;
                    let lap = (-at(j + 2) + 16.0 * at(j + 1) - 30.0 * at(j) + 16.0 * at(j - 1)
                        - at(j - 2))
                        / (12.0 * h * h);
                    (-lap + shift * s[j as usize]) / 4.0
                });
            }
            cur
        }
    }
}

/// Applies a real even Fourier multiplier `mult(|m|)` to circular frequencies
/// `|m| <= cutoff`; higher frequencies are removed.
pub fn apply_circle_multiplier(
    f: &CircleFunction,
    cutoff: usize,
    mult: impl Fn(usize) -> f64,
) -> CircleFunction {
    let len = f.len();
    let mut buf: Vec<Complex<f64>> = f.samples().iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(len).process(&mut buf);
    for (k, b) in buf.iter_mut().enumerate() {
        let m = k.min(len - k);
        *b = if m <= cutoff {
            *b * mult(m)
        } else {
            Complex::new(0.0, 0.0)
        };
    }
    planner.plan_fft_inverse(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    CircleFunction {
        samples: buf.iter().map(|b| b.re * scale).collect(),
    }
}

/// Zonal polynomial of degree `m` for `S^{n-1}`, normalised to 1 at `t = 1`.
///
/// `n = 2` uses `cos(m arccos t)`; `n = 3` is Legendre; larger `n` uses
/// Gegenbauer polynomials of index `(n - 2) / 2`.
fn zonal_polynomial(m: usize, n: usize, theta: f64) -> f64 {
    if n == 2 {
        return (m as f64 * theta).cos();
    }
    let lambda = (n as f64 - 2.0) / 2.0;
    let eval = |t: f64| -> f64 {
        let (mut c0, mut c1) = (1.0, 2.0 * lambda * t);
        if m == 0 {
            return c0;
        }
        for k in 2..=m {
            let kf = k as f64;
            let c2 = (2.0 * t * (kf + lambda - 1.0) * c1 - (kf + 2.0 * lambda - 2.0) * c0) / kf;
            c0 = c1;
            c1 = c2;
        }
        c1
    };
    eval(theta.cos()) / eval(1.0)
}

/// `lambda_m = |S^{n-2}| int_{-1}^{1} |t| P_m(t) (1 - t^2)^{(n-3)/2} dt`,
/// integrated in `t = cos(theta)` so the endpoint weight becomes `sin^{n-2}`.
///
/// Odd degrees give an odd integrand in `t` and return exactly zero.
pub fn funk_hecke_lambda(m: usize, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!(
            "Funk-Hecke eigenvalues need n >= 2, got {n}"
        )));
    }
    if m % 2 == 1 {
        return Ok(0.0);
    }
    let weight = sphere_area(n - 1)?;
    let power = n as i32 - 2;
    let integrand =
        |theta: f64| theta.cos().abs() * zonal_polynomial(m, n, theta) * theta.sin().powi(power);
    const TOL: f64 = 1e-14;
    let integral = adaptive_simpson(0.0, PI / 2.0, TOL, integrand)
        + adaptive_simpson(PI / 2.0, PI, TOL, integrand);
    Ok(weight * integral)
}
