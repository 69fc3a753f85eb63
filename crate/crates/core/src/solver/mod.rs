//! Time integration of the forced dissipative SQG equation.
//!
//! The linear part `nu Lambda + (1/eps) R1` is diagonal in frequency and is
//! integrated exactly through an integrating factor; the transport term is
//! explicit (Heun or classical RK4 in the interaction picture).

mod config;
mod data;
mod rhs;
mod trajectory;

pub use config::{Integrator, ScalingRegime, SolverConfig, DT_FLOOR};
pub use data::{
    boundary_decay, make_ill_prepared_data, IllPreparedFamily, ZonalShape, DECAY_FRACTION, DECAY_LIMIT,
};
pub use rhs::{linear_symbol, nonlinear_term, step, transport_term};
pub use trajectory::{integrate, RunStatus, Sample, Trajectory};

#[cfg(test)]
mod tests;
