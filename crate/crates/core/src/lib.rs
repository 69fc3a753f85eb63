//! Pseudo-spectral simulation of the dissipative SQG equation with a strong
//! dispersive Riesz forcing, on a strip periodic in `x1` and truncated
//! (periodically) in `x2`:
//!
//! ```text
//! d_t theta + div(theta u) + nu Lambda theta + (1/eps) R1 theta = 0,   u = (-R2 theta, R1 theta)
//! ```
//!
//! Besides the solver, the crate carries the closed-form limit models for
//! `eps -> 0`, a Littlewood-Paley toolbox and the diagnostics that compare
//! solver output against the limits.

pub mod diagnostics;
pub mod error;
pub mod limit;
pub mod lp;
pub mod random;
pub mod snapshot;
pub mod solver;
pub mod spectral;

pub use error::{Result, SqgError};

/// Solver version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
