//! Geometric primitives, lattice conventions and sample containers.

use std::f64::consts::{PI, TAU};

use statrs::function::gamma::gamma;

use crate::error::{config, domain, Result};

pub type Point2 = [f64; 2];

/// Area of the unit sphere `S^{n-1}` embedded in `R^n`, `2 pi^{n/2} / Gamma(n/2)`.
///
/// `sphere_area(1)` is the counting measure of `S^0 = {-1, 1}`.
pub fn sphere_area(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("sphere_area needs n >= 1"));
    }
    let half = n as f64 / 2.0;
    Ok(2.0 * PI.powf(half) / gamma(half))
}

/// Planar direction `(sin phi, cos phi)` stored by its angle reduced to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction2 {
    phi: f64,
}

impl Direction2 {
    pub fn new(phi: f64) -> Self {
        let mut phi = phi.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        if phi >= TAU {
            phi = 0.0;
        }
        Self { phi }
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> Point2 {
        let (s, c) = self.phi.sin_cos();
        [s, c]
    }

    pub fn dot(&self, p: Point2) -> f64 {
        let [s, c] = self.unit_vector();
        s * p[0] + c * p[1]
    }

    pub fn opposite(&self) -> Self {
        Self::new(self.phi + PI)
    }
}

/// Rotates `p` so that `unit_vector(phi)` maps to `unit_vector(phi + alpha)`.
pub fn rotate_point(p: Point2, alpha: f64) -> Point2 {
    let (s, c) = alpha.sin_cos();
    [p[0] * c + p[1] * s, -p[0] * s + p[1] * c]
}

/// Unit vector in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionN {
    components: Vec<f64>,
}

impl DirectionN {
    const NORM_TOL: f64 = 1e-12;

    /// Wraps an already normalised vector; rejects anything off the unit sphere.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        let norm = norm(&components);
        if components.is_empty() || (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(domain(format!("direction has norm {norm}, expected 1")));
        }
        Ok(Self { components })
    }

    /// Normalises a nonzero vector.
    pub fn normalized(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if n == 0.0 || !n.is_finite() {
            return Err(domain("cannot normalise a zero or non-finite vector"));
        }
        Ok(Self {
            components: v.into_iter().map(|x| x / n).collect(),
        })
    }

    /// Canonical basis vector `e_k` (0-based) of `R^n`.
    pub fn basis(n: usize, k: usize) -> Self {
        assert!(k < n);
        let mut components = vec![0.0; n];
        components[k] = 1.0;
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.components.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn neg(&self) -> Self {
        Self {
            components: self.components.iter().map(|x| -x).collect(),
        }
    }
}

impl From<Direction2> for DirectionN {
    fn from(d: Direction2) -> Self {
        Self {
            components: d.unit_vector().to_vec(),
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Round cone `{x : (x - u).beta = |x - u| cos psi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cone {
    vertex: Vec<f64>,
    axis: DirectionN,
    opening: f64,
}

impl Cone {
    pub fn new(vertex: Vec<f64>, axis: DirectionN, opening: f64) -> Result<Self> {
        if vertex.len() != axis.dim() {
            return Err(config("cone vertex and axis dimensions differ"));
        }
        if !(opening > 0.0 && opening < PI) {
            return Err(domain(format!("opening angle {opening} not in (0, pi)")));
        }
        Ok(Self {
            vertex,
            axis,
            opening,
        })
    }

    pub fn vertex(&self) -> &[f64] {
        &self.vertex
    }

    pub fn axis(&self) -> &DirectionN {
        &self.axis
    }

    pub fn opening(&self) -> f64 {
        self.opening
    }

    /// Membership up to `tol * (1 + |x - u|)`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let d: Vec<f64> = x.iter().zip(&self.vertex).map(|(a, b)| a - b).collect();
        let r = norm(&d);
        (self.axis.dot(&d) - r * self.opening.cos()).abs() <= tol * (1.0 + r)
    }

    /// Same surface described with axis `-beta` and opening `pi - psi`.
    pub fn reflect(&self) -> Self {
        Self {
            vertex: self.vertex.clone(),
            axis: self.axis.neg(),
            opening: PI - self.opening,
        }
    }
}

/// Square pixel raster geometry: `n_px` pixels per side covering
/// `center + [-L, L]^2`.
///
/// Row index `i` runs along y and column index `j` along x; pixel centers sit
/// at `-L + (k + 0.5) * 2L / n_px` offset by `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_px: usize,
    pub half_extent: f64,
    pub center: Point2,
}

impl GridSpec {
    pub fn new(n_px: usize, half_extent: f64) -> Result<Self> {
        Self::centered_at(n_px, half_extent, [0.0, 0.0])
    }

    pub fn centered_at(n_px: usize, half_extent: f64, center: Point2) -> Result<Self> {
        if n_px < 2 {
            return Err(config("grid needs at least 2 pixels per side"));
        }
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return Err(config("grid half extent must be positive"));
        }
        Ok(Self {
            n_px,
            half_extent,
            center,
        })
    }

    pub fn pixel_size(&self) -> f64 {
        2.0 * self.half_extent / self.n_px as f64
    }

    /// Coordinate of pixel index `k` along one axis (without the center offset).
    pub fn coordinate(&self, k: usize) -> f64 {
        -self.half_extent + (k as f64 + 0.5) * self.pixel_size()
    }

    pub fn pixel_center(&self, row: usize, col: usize) -> Point2 {
        [
            self.center[0] + self.coordinate(col),
            self.center[1] + self.coordinate(row),
        ]
    }

    pub fn len(&self) -> usize {
        self.n_px * self.n_px
    }

    pub fn is_empty(&self) -> bool {
        self.n_px == 0
    }
}

/// Row-major raster over a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    spec: GridSpec,
    values: Vec<f64>,
}

impl ImageGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            values: vec![0.0; spec.len()],
        }
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(config(format!(
                "image has {} values, grid needs {}",
                values.len(),
                spec.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("image values must be finite"));
        }
        Ok(Self { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn n_px(&self) -> usize {
        self.spec.n_px
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.spec.n_px + col]
    }

    /// Bilinear interpolation between pixel centers; zero outside the raster.
    pub fn sample_bilinear(&self, p: Point2) -> f64 {
        let h = self.spec.pixel_size();
        let n = self.spec.n_px as isize;
        let fx = (p[0] - self.spec.center[0] + self.spec.half_extent) / h - 0.5;
        let fy = (p[1] - self.spec.center[1] + self.spec.half_extent) / h - 0.5;
        if !(fx > -1.0 && fy > -1.0 && fx < n as f64 && fy < n as f64) {
            return 0.0;
        }
        let x0 = fx.floor();
        let y0 = fy.floor();
        let tx = fx - x0;
        let ty = fy - y0;
        let (x0, y0) = (x0 as isize, y0 as isize);
        let at = |r: isize, c: isize| -> f64 {
            if r < 0 || c < 0 || r >= n || c >= n {
                0.0
            } else {
                self.values[(r * n + c) as usize]
            }
        };
        (1.0 - ty) * ((1.0 - tx) * at(y0, x0) + tx * at(y0, x0 + 1))
            + ty * ((1.0 - tx) * at(y0 + 1, x0) + tx * at(y0 + 1, x0 + 1))
    }

    pub fn scale(&mut self, factor: f64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }

    /// `||self - truth|| / ||truth||` over all pixels.
    pub fn rel_l2_error(&self, truth: &ImageGrid) -> f64 {
        let num: f64 = self
            .values
            .iter()
            .zip(&truth.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let den: f64 = truth.values.iter().map(|b| b * b).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }
}

/// Parallel-beam Radon samples: `n_theta` angles uniform on `[0, pi)`,
/// `n_s` offsets uniform on `[-S, S]` (both endpoints included).
///
/// The line for sample `(j, i)` is `{x : x . unit_vector(theta_j) = s_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadonSinogram {
    n_theta: usize,
    n_s: usize,
    s_max: f64,
    values: Vec<f64>,
}

impl RadonSinogram {
    pub fn zeros(n_theta: usize, n_s: usize, s_max: f64) -> Result<Self> {
        Self::from_values(n_theta, n_s, s_max, vec![0.0; n_theta * n_s])
    }

    pub fn from_values(n_theta: usize, n_s: usize, s_max: f64, values: Vec<f64>) -> Result<Self> {
        if n_theta == 0 || n_s < 2 {
            return Err(config("radon sinogram needs n_theta >= 1 and n_s >= 2"));
        }
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(config("radon sinogram offset range must be positive"));
        }
        if values.len() != n_theta * n_s {
            return Err(config("radon sinogram value count does not match lattice"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("radon sinogram values must be finite"));
        }
        Ok(Self {
            n_theta,
            n_s,
            s_max,
            values,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_s(&self) -> usize {
        self.n_s
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    pub fn ds(&self) -> f64 {
        2.0 * self.s_max / (self.n_s - 1) as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * PI / self.n_theta as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        -self.s_max + i as f64 * self.ds()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.n_s..(j + 1) * self.n_s]
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.values[j * self.n_s + i]
    }

    /// Linear interpolation in `s` along projection `j`; zero for `|s| > S`.
    pub fn interpolate(&self, j: usize, s: f64) -> f64 {
        interpolate_row(self.row(j), self.s_max, self.ds(), s)
    }
}

pub(crate) fn interpolate_row(row: &[f64], s_max: f64, ds: f64, s: f64) -> f64 {
    let f = (s + s_max) / ds;
    let last = (row.len() - 1) as f64;
    if !(f >= 0.0 && f <= last) {
        return 0.0;
    }
    let i0 = (f.floor() as usize).min(row.len() - 2);
    let t = f - i0 as f64;
    (1.0 - t) * row[i0] + t * row[i0 + 1]
}

/// Cone data on a vertex x axis-angle x opening lattice.
///
/// Axis angles are `phi_j = 2 pi j / n_beta`; openings are the midpoints
/// `psi_k = (k + 0.5) pi / n_psi`, which never touch 0 or pi. Values are
/// stored vertex-major, then beta, then psi.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSinogram {
    vertices: Vec<Point2>,
    n_beta: usize,
    n_psi: usize,
    values: Vec<f64>,
}

impl ConeSinogram {
    pub fn from_values(
        vertices: Vec<Point2>,
        n_beta: usize,
        n_psi: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n_beta == 0 || n_psi == 0 {
            return Err(config("cone sinogram needs n_beta >= 1 and n_psi >= 1"));
        }
        if values.len() != vertices.len() * n_beta * n_psi {
            return Err(config("cone sinogram value count does not match lattice"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("cone sinogram values must be finite"));
        }
        Ok(Self {
            vertices,
            n_beta,
            n_psi,
            values,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn n_psi(&self) -> usize {
        self.n_psi
    }

    pub fn beta_angle(&self, j: usize) -> f64 {
        beta_angle(j, self.n_beta)
    }

    pub fn psi(&self, k: usize) -> f64 {
        psi_midpoint(k, self.n_psi)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, v: usize, j: usize, k: usize) -> f64 {
        self.values[(v * self.n_beta + j) * self.n_psi + k]
    }

    /// The `n_beta x n_psi` block belonging to vertex `v`.
    pub fn block(&self, v: usize) -> &[f64] {
        let len = self.n_beta * self.n_psi;
        &self.values[v * len..(v + 1) * len]
    }
}

pub fn beta_angle(j: usize, n_beta: usize) -> f64 {
    TAU * j as f64 / n_beta as f64
}

pub fn psi_midpoint(k: usize, n_psi: usize) -> f64 {
    (k as f64 + 0.5) * PI / n_psi as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2).unwrap() - TAU).abs() < 1e-14);
        assert!((sphere_area(3).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(1).unwrap() - 2.0).abs() < 1e-14);
        assert!(sphere_area(0).is_err());
    }

    #[test]
    fn sphere_area_recursion() {
        for n in 1..=10usize {
            let lhs = sphere_area(n + 1).unwrap();
            let nf = n as f64;
            let rhs =
                sphere_area(n).unwrap() * PI.sqrt() * gamma(nf / 2.0) / gamma((nf + 1.0) / 2.0);
            assert!((lhs - rhs).abs() < 1e-12 * lhs.max(1.0), "n={n}");
        }
    }

    #[test]
    fn direction_uses_sin_cos_convention() {
        let d = Direction2::new(PI / 2.0).unit_vector();
        assert!((d[0] - 1.0).abs() < 1e-15 && d[1].abs() < 1e-15);
        let d = Direction2::new(-PI / 2.0);
        assert!((d.phi() - 1.5 * PI).abs() < 1e-15);
        assert!(Direction2::new(-1e-300).phi() < TAU);
    }

    #[test]
    fn cone_membership() {
        let axis = DirectionN::basis(2, 1);
        let cone = Cone::new(vec![0.0, 0.0], axis, FRAC_PI_4).unwrap();
        assert!(cone.contains(&[0.0, 0.0], 1e-12));
        for d in [0.1, 1.0, 7.5] {
            let x = [d / 2f64.sqrt(), d / 2f64.sqrt()];
            assert!(cone.contains(&x, 1e-12));
        }
        assert!(!cone.contains(&[0.0, 1.0], 1e-6));
    }

    #[test]
    fn cone_rejects_degenerate_openings() {
        let axis = DirectionN::basis(2, 1);
        assert!(Cone::new(vec![0.0, 0.0], axis.clone(), 0.0).is_err());
        assert!(Cone::new(vec![0.0, 0.0], axis.clone(), PI).is_err());
        assert!(Cone::new(vec![0.0, 0.0, 0.0], axis, 1.0).is_err());
    }

    #[test]
    fn reflect_examples() {
        let e2 = DirectionN::basis(2, 1);
        let cone = Cone::new(vec![0.0, 0.0], e2.clone(), PI / 3.0).unwrap();
        let r = cone.reflect();
        assert_eq!(r.axis(), &e2.neg());
        assert!((r.opening() - 2.0 * PI / 3.0).abs() < 1e-15);
        let half = Cone::new(vec![1.0, 2.0], e2, PI / 2.0).unwrap().reflect();
        assert!((half.opening() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn direction_n_validation() {
        assert!(DirectionN::new(vec![1.0, 1.0]).is_err());
        let d = DirectionN::normalized(vec![3.0, 4.0]).unwrap();
        assert!((d.components()[0] - 0.6).abs() < 1e-15);
        assert!(DirectionN::normalized(vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn grid_pixel_centers() {
        let g = GridSpec::new(4, 1.0).unwrap();
        assert_eq!(g.pixel_center(0, 0), [-0.75, -0.75]);
        assert_eq!(g.pixel_center(3, 1), [-0.25, 0.75]);
        assert!(GridSpec::new(1, 1.0).is_err());
    }

    #[test]
    fn bilinear_reproduces_pixels_and_vanishes_outside() {
        let spec = GridSpec::new(3, 1.5).unwrap();
        let img = ImageGrid::from_values(spec, (0..9).map(|v| v as f64).collect()).unwrap();
        assert_eq!(img.sample_bilinear([0.0, 0.0]), 4.0);
        assert_eq!(img.sample_bilinear([0.5, 0.0]), 4.5);
        assert_eq!(img.sample_bilinear([10.0, 0.0]), 0.0);
    }

    #[test]
    fn lattice_conventions() {
        let sino = RadonSinogram::zeros(4, 5, 2.0).unwrap();
        assert_eq!(sino.s(0), -2.0);
        assert_eq!(sino.s(4), 2.0);
        assert!((sino.theta(2) - PI / 2.0).abs() < 1e-15);
        assert!(psi_midpoint(0, 4) > 0.0 && psi_midpoint(3, 4) < PI);
    }

    proptest! {
        #[test]
        fn unit_vectors_have_unit_norm(phi in -100.0f64..100.0) {
            let v = Direction2::new(phi).unit_vector();
            prop_assert!((norm(&v) - 1.0).abs() < 1e-12);
            prop_assert!(Direction2::new(phi).phi() < TAU);
        }

        #[test]
        fn reflect_is_an_involution(phi in 0.0f64..TAU, psi in 0.01f64..3.13) {
            let axis: DirectionN = Direction2::new(phi).into();
            let cone = Cone::new(vec![0.3, -0.2], axis, psi).unwrap();
            let back = cone.reflect().reflect();
            prop_assert_eq!(back.axis(), cone.axis());
            prop_assert!((back.opening() - cone.opening()).abs() < 1e-15);
        }
    }
}
