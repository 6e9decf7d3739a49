//! Reconstruction from cone data: the two direct backprojection routes and
//! the Compton-camera pipeline through Radon data.

mod compton;
mod direct;

pub use compton::{
    compton_reconstruct, compton_reconstruct_from_data, cone_to_radon_even,
    cone_to_radon_even_with, BinningReport, CameraConfig, ComptonReconstruction, RadonSample,
    EMPTY_BIN_WARNING,
};
pub use direct::{
    invert_mu_weighted, invert_sine_weighted, mu_constant_self_test, mu_weighted_constant,
    sine_weighted_constant, MuWeight, BACKPROJECTION_PADDING,
};
