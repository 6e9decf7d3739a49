//! Executable forms of the integral relations between cone and Radon data.
//!
//! Each check evaluates both sides independently by quadrature and reports
//! them together with their relative discrepancy.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::OnceLock;

use statrs::function::gamma::gamma;

use super::forward::{cone_forward_vertical, dot3, radon_3d, Point3, RadialCallable3};
use crate::error::{domain, Result};
use crate::geometry::{psi_midpoint, sphere_area, Point2};
use crate::phantom::Phantom;
use crate::quadrature::{periodic_trapezoid, GaussLegendre, SphereRule};
use crate::xforms::{funk_hecke_lambda, Harmonic};

/// Both sides of an identity and their relative discrepancy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// Magnitudes below this are treated as exact zeros.
const ZERO_FLOOR: f64 = 1e-14;

impl IdentityCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self::with_scale(lhs, rhs, 0.0)
    }

    /// Relative error against `max(|lhs|, |rhs|, scale)`; `scale` guards
    /// identities whose sides can cancel to near zero.
    pub fn with_scale(lhs: f64, rhs: f64, scale: f64) -> Self {
        let denom = lhs.abs().max(rhs.abs()).max(scale);
        let rel_err = if lhs.abs() < ZERO_FLOOR && rhs.abs() < ZERO_FLOOR {
            0.0
        } else {
            (lhs - rhs).abs() / denom
        };
        Self { lhs, rhs, rel_err }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.rel_err <= tol
    }
}

/// Trapezoid nodes for circle integrals of Radon data.
const CIRCLE_NODES: usize = 4096;
/// Trapezoid nodes for the `|omega . beta|`-weighted integral, offset so the
/// kinks of the weight fall on nodes.
const WEIGHTED_CIRCLE_NODES: usize = 2048;

fn unit(phi: f64) -> Point2 {
    let (s, c) = phi.sin_cos();
    [s, c]
}

/// `int_{S^1} Rf(omega, u . omega) w(omega) d omega` with `n` trapezoid nodes from `offset`.
fn backprojected_radon(
    phantom: &Phantom,
    u: Point2,
    n: usize,
    offset: f64,
    weight: impl Fn(f64) -> f64,
) -> f64 {
    periodic_trapezoid(n, offset, |t| {
        let w = unit(t);
        phantom.radon_vec(w, u[0] * w[0] + u[1] * w[1]) * weight(t)
    })
}

/// Midpoint rule in the opening angle: `sum_k weight(psi_k) Cf(u, phi, psi_k) pi / n_psi`.
fn psi_midpoint_sum(
    phantom: &Phantom,
    u: Point2,
    phi: f64,
    n_psi: usize,
    weight: impl Fn(f64) -> f64,
) -> f64 {
    (0..n_psi)
        .map(|k| {
            let psi = psi_midpoint(k, n_psi);
            phantom.cone_value(u, phi, psi) * weight(psi)
        })
        .sum::<f64>()
        * PI
        / n_psi as f64
}

/// `int_0^pi Cf(u, beta, psi) d psi = (1/2) R^# R f(u)` in the plane.
pub fn check_identity_psi_integral(
    phantom: &Phantom,
    u: Point2,
    phi: f64,
    n_psi: usize,
) -> IdentityCheck {
    let lhs = psi_midpoint_sum(phantom, u, phi, n_psi, |_| 1.0);
    let rhs = 0.5 * backprojected_radon(phantom, u, CIRCLE_NODES, 0.0, |_| 1.0);
    IdentityCheck::new(lhs, rhs)
}

/// `int_0^pi Cf(u, beta, psi) sin psi d psi = (pi / |S^1|) int Rf(omega, omega . u) |omega . beta| d omega`.
pub fn check_identity_sine_weighted(
    phantom: &Phantom,
    u: Point2,
    phi: f64,
    n_psi: usize,
) -> IdentityCheck {
    let lhs = psi_midpoint_sum(phantom, u, phi, n_psi, f64::sin);
    let integral = backprojected_radon(phantom, u, WEIGHTED_CIRCLE_NODES, phi, |t| {
        (t - phi).cos().abs()
    });
    IdentityCheck::new(lhs, 0.5 * integral)
}

/// Constant relating the doubly integrated sine-weighted cone data to
/// `R^# R f` in `R^n`: `pi Gamma(n) / (2^{n-1} Gamma((n+1)/2)^2)`.
pub fn bpr_constant(n: usize) -> f64 {
    let nf = n as f64;
    PI * gamma(nf) / (2f64.powf(nf - 1.0) * gamma((nf + 1.0) / 2.0).powi(2))
}

/// `sum_j sum_k Cf(u, phi_j, psi_k) sin(psi_k) Y(phi_j)` over the lattice, with
/// the absolute integrand accumulated alongside.
fn double_sum(
    phantom: &Phantom,
    u: Point2,
    n_beta: usize,
    n_psi: usize,
    harmonic: impl Fn(f64) -> f64,
) -> (f64, f64) {
    let cell = (TAU / n_beta as f64) * (PI / n_psi as f64);
    let (mut acc, mut abs) = (0.0, 0.0);
    for j in 0..n_beta {
        let phi = TAU * j as f64 / n_beta as f64;
        let y = harmonic(phi);
        for k in 0..n_psi {
            let psi = psi_midpoint(k, n_psi);
            let v = phantom.cone_value(u, phi, psi) * psi.sin() * y;
            acc += v;
            abs += v.abs();
        }
    }
    (acc * cell, abs * cell)
}

/// `int_{S^1} int_0^pi Cf(u, beta, psi) sin psi d psi d beta = 2 R^# R f(u)` in the plane.
pub fn check_identity_bpr(
    phantom: &Phantom,
    u: Point2,
    n_beta: usize,
    n_psi: usize,
) -> IdentityCheck {
    let (lhs, _) = double_sum(phantom, u, n_beta, n_psi, |_| 1.0);
    let rhs = bpr_constant(2) * backprojected_radon(phantom, u, CIRCLE_NODES, 0.0, |_| 1.0);
    IdentityCheck::new(lhs, rhs)
}

/// Scale turning the Funk–Hecke eigenvalue of `|t|` into the eigenvalue of
/// the normalised cosine transform on the circle.
///
/// Two readings are possible (`1` and `1/|S^1|`); the one for which the
/// zeroth harmonic reproduces [`bpr_constant`] is kept.
pub fn harmonic_lambda_scale() -> f64 {
    static SCALE: OnceLock<f64> = OnceLock::new();
    *SCALE.get_or_init(|| {
        let lambda0 = funk_hecke_lambda(0, 2).expect("n = 2 is valid");
        let target = bpr_constant(2);
        let candidates = [1.0, 1.0 / TAU];
        let best = candidates
            .into_iter()
            .min_by(|a, b| {
                let ea = (PI * lambda0 * a - target).abs();
                let eb = (PI * lambda0 * b - target).abs();
                ea.total_cmp(&eb)
            })
            .expect("two candidates");
        log::debug!("Funk-Hecke eigenvalue scale pinned to {best}");
        best
    })
}

/// Harmonic-weighted form of [`check_identity_bpr`]:
/// `int int Cf(u, beta, psi) Y_m(beta) sin psi = pi lambda_m int Rf(omega, omega . u) Y_m(omega)`.
///
/// The relative error uses the mass of the weighted integrand as a floor,
/// since both sides can nearly cancel.
pub fn check_sph_harm_relation(
    phantom: &Phantom,
    u: Point2,
    m: usize,
    kind: Harmonic,
    n_beta: usize,
    n_psi: usize,
) -> IdentityCheck {
    let mf = m as f64;
    let y = |t: f64| match kind {
        Harmonic::Cos => (mf * t).cos(),
        Harmonic::Sin => (mf * t).sin(),
    };
    let (lhs, mass) = double_sum(phantom, u, n_beta, n_psi, y);
    let lambda = funk_hecke_lambda(m, 2).expect("n = 2 is valid") * harmonic_lambda_scale();
    let rhs = PI * lambda * backprojected_radon(phantom, u, CIRCLE_NODES, 0.0, y);
    IdentityCheck::with_scale(lhs, rhs, mass)
}

const RAY_NODES: usize = 16;
const RAY_PANELS: usize = 4;
const ASGEIRSSON_CIRCLE_NODES: usize = 2048;

/// Planar mean-value relation
/// `int_{S^1} Rf(omega, p + u . omega) d omega = |S^0| int_{S^1} int_{|p|}^inf f(u + r omega) (r^2 - p^2)^{-1/2} r dr d omega`.
///
/// For `p != 0` the substitution `r = |p| cosh t` removes the endpoint singularity.
pub fn check_asgeirsson_2d(phantom: &Phantom, u: Point2, p: f64) -> IdentityCheck {
    let lhs = periodic_trapezoid(CIRCLE_NODES, 0.0, |t| {
        let w = unit(t);
        phantom.radon_vec(w, p + u[0] * w[0] + u[1] * w[1])
    });
    let gl = GaussLegendre::new(RAY_NODES);
    let reach = phantom.reach_from(u);
    let a = p.abs();
    let rhs = if a >= reach {
        0.0
    } else {
        periodic_trapezoid(ASGEIRSSON_CIRCLE_NODES, 0.0, |t| {
            let w = unit(t);
            let at = |r: f64| phantom.eval([u[0] + r * w[0], u[1] + r * w[1]]);
            let breaks = phantom.ray_breakpoints(u, w);
            if a == 0.0 {
                gl.piecewise(0.0, reach, &breaks, RAY_PANELS, at)
            } else {
                let t_breaks: Vec<f64> = breaks
                    .iter()
                    .filter(|r| **r > a)
                    .map(|r| (r / a).acosh())
                    .collect();
                gl.piecewise(0.0, (reach / a).acosh(), &t_breaks, RAY_PANELS, |s| {
                    let r = a * s.cosh();
                    at(r) * r
                })
            }
        }) * sphere_area(1).expect("n = 1 is valid")
    };
    IdentityCheck::new(lhs, rhs)
}

const SPHERE_POLAR: usize = 24;
const SPHERE_AZIMUTH: usize = 48;

/// Spatial mean-value relation in `R^3`:
/// `int_{S^2} Rf(omega, p + u . omega) d omega = |S^1| int_{S^2} int_{|p|}^inf f(u + r omega) r dr d omega`.
pub fn check_asgeirsson_3d(f: &RadialCallable3, u: Point3, p: f64) -> IdentityCheck {
    let rule = SphereRule::new(SPHERE_POLAR, SPHERE_AZIMUTH);
    let lhs = rule.integrate(|w| radon_3d(f, w, p + dot3(u, w)));
    let a = p.abs();
    let reach = (dot3(u, u)).sqrt() + f.support_radius();
    let gl = GaussLegendre::new(RAY_NODES * 2);
    let rhs = if a >= reach {
        0.0
    } else {
        rule.integrate(|w| {
            gl.composite(a, reach, RAY_PANELS, |r| {
                f.eval([u[0] + r * w[0], u[1] + r * w[1], u[2] + r * w[2]]) * r
            })
        }) * sphere_area(2).expect("n = 2 is valid")
    };
    IdentityCheck::new(lhs, rhs)
}

const LEMMA_NODES: usize = 24;
const LEMMA_PANELS: usize = 4;

/// Exterior-of-two-cones relation in `R^3` for vertex `0` and axis `e_3`:
/// `int_{psi0}^{pi - psi0} Cf(0, e_3, psi) (cos^2 psi0 - cos^2 psi)^{-1/2} d psi
///  = (1 / |S^0|) int_{S^1} Rf(((cos psi0) w, sin psi0), 0) dw`.
///
/// The left side is integrated in `tau` with `cos psi = cos psi0 sin tau`,
/// which turns the weight into `1 / sin psi`.
pub fn check_lemma_cone_radon(f: &RadialCallable3, psi0: f64) -> Result<IdentityCheck> {
    if !(psi0 > 0.0 && psi0 < FRAC_PI_2) {
        return Err(domain(format!("psi0 = {psi0} not in (0, pi/2)")));
    }
    let c0 = psi0.cos();
    let gl = GaussLegendre::new(LEMMA_NODES);
    let mut err = None;
    let lhs = gl.composite(-FRAC_PI_2, FRAC_PI_2, LEMMA_PANELS, |tau| {
        let psi = (c0 * tau.sin()).acos();
        match cone_forward_vertical(f, [0.0; 3], psi) {
            Ok(v) => v / psi.sin(),
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let s0 = psi0.sin();
    let rhs = periodic_trapezoid(256, 0.0, |t| {
        let (s, c) = t.sin_cos();
        radon_3d(f, [c0 * s, c0 * c, s0], 0.0)
    }) / sphere_area(1)?;
    Ok(IdentityCheck::new(lhs, rhs))
}
