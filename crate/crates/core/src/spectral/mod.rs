//! Grids, transforms and Fourier multipliers.

mod field;
mod grid;
mod ops;

pub use field::{PhysicalField, SpectralField};
pub(crate) use field::lp_norm;
pub use grid::{Grid, GridSpec, DEFAULT_L1, DEFAULT_L2};
pub use ops::{
    dealias, dealias_keeps, derivative, derivative_symbol, divergence, drop_nyquist, forward_transform,
    fractional_laplacian, horizontal_mean, inverse_transform, pseudo_product, riesz, riesz_symbol,
    velocity_from_theta, Axis, MEAN_FREE_TOL,
};
