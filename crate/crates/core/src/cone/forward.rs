use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{config, domain, Result};
use crate::geometry::{beta_angle, norm, psi_midpoint, ConeSinogram, DirectionN, Point2};
use crate::phantom::Phantom;
use crate::quadrature::{adaptive_simpson, GaussLegendre};

pub type Point3 = [f64; 3];

/// Cone data of a planar phantom on a vertex x axis x opening lattice.
pub fn cone_forward_sinogram(
    phantom: &Phantom,
    vertices: &[Point2],
    n_beta: usize,
    n_psi: usize,
) -> Result<ConeSinogram> {
    if n_psi < 2 || n_beta == 0 {
        return Err(config("cone sinogram needs n_beta >= 1 and n_psi >= 2"));
    }
    let block = n_beta * n_psi;
    let mut values = vec![0.0; vertices.len() * block];
    values
        .par_chunks_mut(block)
        .zip(vertices.par_iter())
        .for_each(|(out, &u)| {
            for j in 0..n_beta {
                let phi = beta_angle(j, n_beta);
                for k in 0..n_psi {
                    out[j * n_psi + k] = phantom.cone_value(u, phi, psi_midpoint(k, n_psi));
                }
            }
        });
    ConeSinogram::from_values(vertices.to_vec(), n_beta, n_psi, values)
}

/// A compactly supported function on `R^3`, zero outside the ball of radius
/// `support_radius` about the origin.
#[derive(Clone)]
pub struct RadialCallable3 {
    eval: Arc<dyn Fn(Point3) -> f64 + Send + Sync>,
    support_radius: f64,
}

impl fmt::Debug for RadialCallable3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialCallable3")
            .field("support_radius", &self.support_radius)
            .finish()
    }
}

/// Gaussians are cut off where they fall below `exp(-GAUSS_CUTOFF^2 / 2)`.
const GAUSS_CUTOFF: f64 = 8.5;

impl RadialCallable3 {
    /// Values outside the support ball are forced to zero.
    pub fn new(
        support_radius: f64,
        f: impl Fn(Point3) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(support_radius > 0.0 && support_radius.is_finite()) {
            return Err(domain("support radius must be positive and finite"));
        }
        let r2 = support_radius * support_radius;
        Ok(Self {
            eval: Arc::new(move |x: Point3| {
                if x[0] * x[0] + x[1] * x[1] + x[2] * x[2] > r2 {
                    0.0
                } else {
                    f(x)
                }
            }),
            support_radius,
        })
    }

    /// `amplitude * exp(-|x - center|^2 / (2 sigma^2))`, truncated at 8.5 sigma.
    pub fn gaussian(center: Point3, sigma: f64, amplitude: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(domain("Gaussian width must be positive"));
        }
        let reach = norm(&center) + GAUSS_CUTOFF * sigma;
        let inv = 1.0 / (2.0 * sigma * sigma);
        Self::new(reach, move |x| {
            let d2 = (x[0] - center[0]).powi(2)
                + (x[1] - center[1]).powi(2)
                + (x[2] - center[2]).powi(2);
            amplitude * (-d2 * inv).exp()
        })
    }

    /// Pointwise sum; the support is the largest of the parts.
    pub fn sum(parts: Vec<Self>) -> Result<Self> {
        let reach = parts.iter().map(|p| p.support_radius).fold(0.0, f64::max);
        if parts.is_empty() {
            return Ok(Self::zero());
        }
        Self::new(reach, move |x| parts.iter().map(|p| p.eval(x)).sum())
    }

    pub fn zero() -> Self {
        Self::new(1.0, |_| 0.0).expect("unit support is valid")
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn eval(&self, x: Point3) -> f64 {
        (self.eval)(x)
    }

    /// `x -> f(x_1, x_2, -x_3)`.
    pub fn reflected(&self) -> Self {
        let inner = Arc::clone(&self.eval);
        Self {
            eval: Arc::new(move |x: Point3| inner([x[0], x[1], -x[2]])),
            support_radius: self.support_radius,
        }
    }
}

/// Two unit vectors completing `axis` to an orthonormal frame.
pub(crate) fn orthonormal_frame(axis: Point3) -> (Point3, Point3) {
    let helper = if axis[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let d = dot3(helper, axis);
    let a = [
        helper[0] - d * axis[0],
        helper[1] - d * axis[1],
        helper[2] - d * axis[2],
    ];
    let na = norm(&a);
    let a = [a[0] / na, a[1] / na, a[2] / na];
    let b = [
        axis[1] * a[2] - axis[2] * a[1],
        axis[2] * a[0] - axis[0] * a[2],
        axis[0] * a[1] - axis[1] * a[0],
    ];
    (a, b)
}

pub(crate) fn dot3(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn to_point3(d: &DirectionN) -> Result<Point3> {
    match d.components() {
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err(config("expected a direction in R^3")),
    }
}

/// Nodes of the trapezoid rule over the circle of cone directions.
const CONE_CIRCLE_NODES: usize = 128;
/// Absolute tolerance of the adaptive rule along the cone generators.
const CONE_RADIAL_TOL: f64 = 1e-11;

/// `Cf(u, beta, psi) = int_0^inf int_{S^1} f(u + rho (sin psi w + cos psi beta)) rho sin psi dw drho`
/// where `w` runs over the unit circle orthogonal to `beta`.
pub fn cone_transform_3d(
    f: &RadialCallable3,
    u: Point3,
    axis: &DirectionN,
    psi: f64,
) -> Result<f64> {
    if !(psi > 0.0 && psi < PI) {
        return Err(domain(format!("opening angle {psi} not in (0, pi)")));
    }
    let beta = to_point3(axis)?;
    let (a, b) = orthonormal_frame(beta);
    let (sp, cp) = psi.sin_cos();
    let h = TAU / CONE_CIRCLE_NODES as f64;
    let dirs: Vec<Point3> = (0..CONE_CIRCLE_NODES)
        .map(|k| {
            let (s, c) = (k as f64 * h).sin_cos();
            [0, 1, 2].map(|i| sp * (c * a[i] + s * b[i]) + cp * beta[i])
        })
        .collect();
    // every point beyond this distance from u is outside the support ball
    let rho_max = norm(&u) + f.support_radius();
    let ring = |rho: f64| -> f64 {
        let sum: f64 = dirs
            .iter()
            .map(|d| f.eval([u[0] + rho * d[0], u[1] + rho * d[1], u[2] + rho * d[2]]))
            .sum();
        sum * h * rho * sp
    };
    Ok(adaptive_simpson(0.0, rho_max, CONE_RADIAL_TOL, ring))
}

/// [`cone_transform_3d`] with the axis along `e_3`.
pub fn cone_forward_vertical(f: &RadialCallable3, u: Point3, psi: f64) -> Result<f64> {
    cone_transform_3d(f, u, &DirectionN::basis(3, 2), psi)
}

const PLANE_RADIAL_NODES: usize = 32;
const PLANE_RADIAL_PANELS: usize = 4;
const PLANE_ANGULAR_NODES: usize = 96;

/// `Rf(omega, s)`: integral over the plane `x . omega = s`, by polar
/// quadrature over the disk where the plane meets the support ball.
pub fn radon_3d(f: &RadialCallable3, omega: Point3, s: f64) -> f64 {
    let r2 = f.support_radius().powi(2) - s * s;
    if r2 <= 0.0 {
        return 0.0;
    }
    let rmax = r2.sqrt();
    let (a, b) = orthonormal_frame(omega);
    let c = [s * omega[0], s * omega[1], s * omega[2]];
    let gl = GaussLegendre::new(PLANE_RADIAL_NODES);
    let h = TAU / PLANE_ANGULAR_NODES as f64;
    let trig: Vec<(f64, f64)> = (0..PLANE_ANGULAR_NODES)
        .map(|k| (k as f64 * h).sin_cos())
        .collect();
    gl.composite(0.0, rmax, PLANE_RADIAL_PANELS, |r| {
        let sum: f64 = trig
            .iter()
            .map(|(sn, cs)| f.eval([0, 1, 2].map(|i| c[i] + r * (cs * a[i] + sn * b[i]))))
            .sum();
        sum * h * r
    })
}
