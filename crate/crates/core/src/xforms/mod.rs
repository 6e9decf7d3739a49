//! Planar Radon machinery, Riesz potentials and operators on the circle.

mod radon;
mod riesz;
mod sphere;

pub use radon::{
    backprojection, fbp_radon_inversion, radon_forward_grid, ramp_filter, ramp_response,
};
pub use riesz::{riesz_apply_2d, riesz_apply_2d_padded, Padding, RieszOrder};
pub use sphere::{
    apply_circle_multiplier, beltrami_poly_apply, beltrami_poly_apply_with,
    beltrami_poly_multiplier, cosine_transform_s1, funk_hecke_lambda, funk_transform_s1,
    CircleFunction, Harmonic, LaplacianMode,
};
