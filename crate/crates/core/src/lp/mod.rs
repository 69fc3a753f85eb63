//! Littlewood-Paley decomposition, Besov norms and measured versions of the
//! Bernstein and commutator inequalities.

mod bernstein;
mod commutator;
mod family;
mod profile;

pub use bernstein::{
    annulus_size, bernstein_check, bernstein_protocol, derivative_ratio, field_lp_norm, gradient_norm, upper_ratio,
    BernsteinReport, BernsteinRow, BernsteinVerdict, HOLDOUT_HEADROOM,
};
pub use commutator::{
    commutator_block, commutator_fit, commutator_profile, random_transport_state, transport, CommutatorFit,
    CommutatorProfile,
};
pub use family::{
    besov_norm, besov_sobolev_weight_range, block_norms, dyadic_block, low_freq_cutoff, low_freq_cutoff_by_blocks,
    BesovIndex, DyadicFamily,
};
pub use profile::{gauss_legendre, SmoothStep};
