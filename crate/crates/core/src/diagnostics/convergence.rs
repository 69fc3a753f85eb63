//! Distance between the horizontal mean of solver runs and a limit model.

use std::fmt::Write as _;

use super::energy::require_valid;
use crate::error::{Result, SqgError};
use crate::limit::{region_l2, LimitModel, ZonalProfile};
use crate::solver::Trajectory;

/// Default observation strip `K = {|x2| <= 0.5 L2}`.
pub const DEFAULT_K_FRACTION: f64 = 0.5;

pub const NORM_ID: &str = "L2([0,T]xK)";

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub epsilons: Vec<f64>,
    /// `D(eps) = || <theta_eps> - bar_theta ||_{L^2([0,T] x K)}`.
    pub deviations: Vec<f64>,
    pub norm_id: String,
    pub horizon: f64,
    pub k_fraction: f64,
}

impl ConvergenceReport {
    pub const CSV_HEADER: &'static str = "epsilon,D,norm_id,T,K_fraction";

    /// Strictly decreasing deviations (as `eps` decreases).
    pub fn strictly_decreasing(&self) -> bool {
        self.deviations.windows(2).all(|w| w[1] < w[0])
    }

    /// Every deviation below `floor`.
    pub fn all_below(&self, floor: f64) -> bool {
        self.deviations.iter().all(|d| *d <= floor)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for (e, d) in self.epsilons.iter().zip(&self.deviations) {
            let _ = writeln!(out, "{e},{d:.12e},{},{},{}", self.norm_id, self.horizon, self.k_fraction);
        }
        out
    }
}

/// `D` for one run: the mean at each sample is compared with the limit model
/// started from the run's own initial mean; trapezoid in time up to `horizon`.
pub fn mean_deviation(traj: &Trajectory, model: LimitModel, horizon: f64, k_fraction: f64) -> Result<f64> {
    require_valid(traj)?;
    if !(k_fraction > 0.0 && k_fraction <= 1.0) {
        return Err(SqgError::InvalidArgument(format!("K fraction {k_fraction} must lie in (0, 1]")));
    }
    let tol = 1e-12 * horizon.max(1.0);
    if traj.final_time() < horizon - tol {
        return Err(SqgError::InvalidTrajectory(format!(
            "trajectory ends at {} before the window end {horizon}",
            traj.final_time()
        )));
    }
    let g = &traj.grid;
    let start = ZonalProfile::new(g, traj.samples[0].mean.clone())?;
    let mut prev: Option<(f64, f64)> = None;
    let mut total = 0.0;
    for s in traj.samples.iter().take_while(|s| s.t <= horizon + tol) {
        let limit = model.evolve(&start, s.t)?;
        let diff = ZonalProfile::new(g, s.mean.clone())?.sub(&limit)?;
        let d2 = region_l2(g, &diff.values(), k_fraction).powi(2);
        if let Some((pt, pd)) = prev {
            total += 0.5 * (s.t - pt) * (pd + d2);
        }
        prev = Some((s.t, d2));
    }
    Ok(total.sqrt())
}

/// Convergence report for a sweep; members must share grid and horizon.
pub fn convergence_metric(
    sweep: &[(f64, &Trajectory)],
    model: LimitModel,
    horizon: f64,
    k_fraction: f64,
) -> Result<ConvergenceReport> {
    if sweep.is_empty() {
        return Err(SqgError::InvalidArgument("empty sweep".into()));
    }
    let grid = &sweep[0].1.grid;
    let mut deviations = Vec::with_capacity(sweep.len());
    for (_, tr) in sweep {
        tr.grid.ensure_same(grid)?;
        deviations.push(mean_deviation(tr, model, horizon, k_fraction)?);
    }
    Ok(ConvergenceReport {
        epsilons: sweep.iter().map(|(e, _)| *e).collect(),
        deviations,
        norm_id: NORM_ID.to_string(),
        horizon,
        k_fraction,
    })
}
