//! Checks on the Riesz term and on the zonal (horizontal-mean) sector.

use num_complex::Complex64;

use super::energy::require_valid;
use crate::error::{Result, SqgError};
use crate::solver::Trajectory;
use crate::spectral::{fractional_laplacian, horizontal_mean, riesz, Axis, SpectralField};

/// `<Lambda^s R1 theta, Lambda^s theta>_{L^2}`, zero for every real field.
pub fn riesz_orthogonality(theta: &SpectralField, s: f64) -> Result<f64> {
    let a = fractional_laplacian(theta, s)?;
    riesz(&a, Axis::X1).inner(&a)
}

/// `||R1 g|| / ||g||`: zero exactly on zonal fields, one on pure `x1` waves.
pub fn constraint_residual(candidate: &SpectralField) -> f64 {
    let n = candidate.l2_norm();
    if n == 0.0 {
        0.0
    } else {
        riesz(candidate, Axis::X1).l2_norm() / n
    }
}

/// Trapezoid time average of the stored snapshots.
pub fn time_average(traj: &Trajectory) -> Result<SpectralField> {
    let times = traj.snapshot_times();
    if times.len() < 2 {
        return Err(SqgError::InvalidTrajectory("time average needs two snapshots".into()));
    }
    let span = times[times.len() - 1] - times[0];
    let mut acc = SpectralField::zeros(&traj.grid);
    for i in 1..times.len() {
        let w = 0.5 * (times[i] - times[i - 1]) / span;
        acc = acc.axpy(w, &traj.snapshots[i - 1])?.axpy(w, &traj.snapshots[i])?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanResidual {
    /// Interior sample times.
    pub times: Vec<f64>,
    /// `L^2` norm of `d_t <theta> + div <theta u> + nu Lambda <theta>` per interior sample.
    pub residuals: Vec<f64>,
    /// Norm of `d_t <theta>` at the same times, for scale.
    pub scales: Vec<f64>,
    /// Largest `|<R1 theta>|` coefficient over the stored snapshots (exactly 0).
    pub riesz_mean_max: f64,
    pub max_residual: f64,
}

/// Residual of the horizontally averaged equation, with a second-order
/// three-point time derivative on the (possibly nonuniform) sample grid.
pub fn mean_equation_residual(traj: &Trajectory, nu: f64) -> Result<MeanResidual> {
    require_valid(traj)?;
    let s = &traj.samples;
    if s.len() < 3 {
        return Err(SqgError::InvalidTrajectory("mean residual needs at least 3 samples".into()));
    }
    let g = &traj.grid;
    let area = g.area();
    let mut out = MeanResidual { times: vec![], residuals: vec![], scales: vec![], riesz_mean_max: 0.0, max_residual: 0.0 };
    for i in 1..s.len() - 1 {
        let (h1, h2) = (s[i].t - s[i - 1].t, s[i + 1].t - s[i].t);
        let (a, b, c) = (-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2)));
        let (mut r2, mut d2) = (0.0, 0.0);
        for kk in 0..g.n2() {
            let dt: Complex64 = s[i - 1].mean[kk] * a + s[i].mean[kk] * b + s[i + 1].mean[kk] * c;
            let r = dt + s[i].mean_transport[kk] + s[i].mean[kk] * (nu * g.xi2(kk).abs());
            r2 += r.norm_sqr();
            d2 += dt.norm_sqr();
        }
        let r = (area * r2).sqrt();
        out.times.push(s[i].t);
        out.residuals.push(r);
        out.scales.push((area * d2).sqrt());
        out.max_residual = out.max_residual.max(r);
    }
    for f in &traj.snapshots {
        let m = horizontal_mean(&riesz(f, Axis::X1));
        out.riesz_mean_max = out.riesz_mean_max.max(m.max_coeff_abs());
    }
    Ok(out)
}
