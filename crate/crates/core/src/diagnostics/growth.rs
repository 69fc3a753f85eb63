//! `H^s` growth along a trajectory and the time `T*`.

use super::energy::require_valid;
use crate::error::{Result, SqgError};
use crate::lp::{besov_norm, BesovIndex, DyadicFamily};
use crate::solver::Trajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct HsGrowth {
    pub s: f64,
    pub times: Vec<f64>,
    /// `B^s_{2,2}` norms of the stored snapshots.
    pub norms: Vec<f64>,
    /// `int_0^t ||theta||^2` (trapezoid).
    pub integral: Vec<f64>,
    /// `sup { t : int_0^t ||theta||^2 <= ||theta_0|| }`, by linear interpolation.
    pub t_star: f64,
    /// True when the threshold is never reached; `t_star` is then the final time.
    pub unbounded: bool,
    /// Smallest `C` with `||theta(t)|| <= ||theta_0|| + C int_0^t ||theta||^2` at every sample.
    pub required_c: f64,
}

impl HsGrowth {
    /// Whether the growth inequality holds with constant `c`.
    pub fn holds_with(&self, c: f64) -> bool {
        let n0 = self.norms[0];
        self.norms.iter().zip(&self.integral).all(|(n, i)| *n <= n0 + c * i + 1e-12 * n0)
    }
}

/// `H^s` growth through the Littlewood-Paley equivalent norm `B^s_{2,2}`,
/// evaluated on the stored snapshots.
pub fn hs_growth(traj: &Trajectory, s: f64) -> Result<HsGrowth> {
    require_valid(traj)?;
    if !s.is_finite() {
        return Err(SqgError::InvalidArgument(format!("s = {s} must be finite")));
    }
    let fam = DyadicFamily::new(&traj.grid);
    let idx = BesovIndex::sobolev(s);
    let times = traj.snapshot_times();
    let norms = traj.snapshots.iter().map(|f| besov_norm(f, idx, &fam)).collect::<Result<Vec<f64>>>()?;
    let mut integral = vec![0.0; norms.len()];
    for i in 1..norms.len() {
        integral[i] = integral[i - 1] + 0.5 * (times[i] - times[i - 1]) * (norms[i - 1].powi(2) + norms[i].powi(2));
    }
    let n0 = norms[0];
    let mut t_star = *times.last().expect("nonempty");
    let mut unbounded = true;
    for i in 1..norms.len() {
        if integral[i] > n0 {
            let frac = (n0 - integral[i - 1]) / (integral[i] - integral[i - 1]);
            t_star = times[i - 1] + frac * (times[i] - times[i - 1]);
            unbounded = false;
            break;
        }
    }
    let required_c = (1..norms.len())
        .filter(|&i| integral[i] > 0.0)
        .map(|i| ((norms[i] - n0) / integral[i]).max(0.0))
        .fold(0.0, f64::max);
    Ok(HsGrowth { s, times, norms, integral, t_star, unbounded, required_c })
}

/// Fit of `T* ~ K / ||theta_0||_{H^s}` over a ladder of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct TStarLadder {
    pub initial_norms: Vec<f64>,
    pub t_stars: Vec<f64>,
    /// `T* ||theta_0||` per rung.
    pub products: Vec<f64>,
    /// Geometric mean of the products.
    pub fitted_k: f64,
    /// Largest `|product / K - 1|`.
    pub max_deviation: f64,
}

pub fn t_star_ladder(reports: &[HsGrowth]) -> Result<TStarLadder> {
    if reports.len() < 2 {
        return Err(SqgError::InvalidArgument("ladder needs at least two runs".into()));
    }
    if let Some(r) = reports.iter().find(|r| r.unbounded) {
        return Err(SqgError::InvalidArgument(format!(
            "T* not reached within the horizon {} for ||theta_0|| = {}",
            r.t_star, r.norms[0]
        )));
    }
    let initial_norms: Vec<f64> = reports.iter().map(|r| r.norms[0]).collect();
    let t_stars: Vec<f64> = reports.iter().map(|r| r.t_star).collect();
    let products: Vec<f64> = initial_norms.iter().zip(&t_stars).map(|(n, t)| n * t).collect();
    let fitted_k = (products.iter().map(|p| p.ln()).sum::<f64>() / products.len() as f64).exp();
    let max_deviation = products.iter().map(|p| (p / fitted_k - 1.0).abs()).fold(0.0, f64::max);
    Ok(TStarLadder { initial_norms, t_stars, products, fitted_k, max_deviation })
}
