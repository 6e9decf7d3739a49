//! Forward cone transforms and the integral relations tying them to Radon data.

mod forward;
mod identities;

pub use forward::{
    cone_forward_sinogram, cone_forward_vertical, cone_transform_3d, radon_3d, Point3,
    RadialCallable3,
};
pub use identities::{
    bpr_constant, check_asgeirsson_2d, check_asgeirsson_3d, check_identity_bpr,
    check_identity_psi_integral, check_identity_sine_weighted, check_lemma_cone_radon,
    check_sph_harm_relation, harmonic_lambda_scale, IdentityCheck,
};
