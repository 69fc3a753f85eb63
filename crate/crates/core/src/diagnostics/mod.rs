//! Diagnostics that hold solver output against the energy balance and the
//! limit equations.

mod convergence;
mod energy;
mod growth;
mod sector;
mod weak;

pub use convergence::{convergence_metric, mean_deviation, ConvergenceReport, DEFAULT_K_FRACTION, NORM_ID};
pub use energy::{energy_ledger, EnergyLedger};
pub use growth::{hs_growth, t_star_ladder, HsGrowth, TStarLadder};
pub use sector::{constraint_residual, mean_equation_residual, riesz_orthogonality, time_average, MeanResidual};
pub use weak::{
    test_function_values, weak_form_residual, weak_form_residual_with, Temporal, TestFunction, WeakFormReport,
    TEST_SUPPORT_MARGIN,
};

#[cfg(test)]
mod tests;
