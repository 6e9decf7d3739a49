//! Cone (Compton camera / V-line) transforms and their relations to the
//! Radon and cosine transforms.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: directions, cones, pixel grids and sinogram containers.
//! - [`phantom`]: analytic disk/Gaussian phantoms with exact ray, Radon and
//!   cone projections.
//! - [`xforms`]: Radon projection, backprojection, filtered backprojection,
//!   Riesz potentials and the operators on the circle (cosine transform,
//!   Funk transform, Beltrami–Laplace polynomials, Funk–Hecke eigenvalues).
//! - [`cone`]: forward cone transforms and executable checks of the integral
//!   identities linking cone data to Radon data.
//! - [`inversion`]: the three reconstruction routes (weighted cone
//!   backprojection, sine-weighted cone backprojection, and the Compton
//!   camera pipeline converting cone data to Radon projections).
//! - [`io`]: binary sinogram formats, images, phantom and config files.
//!
//! # Angle convention
//!
//! A planar direction with angle `phi` is the unit vector `(sin phi, cos phi)`,
//! not `(cos phi, sin phi)`. Every module uses this convention; the 2D cone
//! branch formulas depend on it.

pub mod cone;
pub mod error;
pub mod geometry;
pub mod inversion;
pub mod io;
pub mod metrics;
pub mod phantom;
pub mod quadrature;
pub mod xforms;

pub use error::{Error, Result};
pub use geometry::{
    sphere_area, Cone, ConeSinogram, Direction2, DirectionN, GridSpec, ImageGrid, Point2,
    RadonSinogram,
};
pub use phantom::{Disk, GaussianBlob, Phantom};
