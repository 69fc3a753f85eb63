//! Measured Bernstein ratios for annulus-supported random fields.
//!
//! Inequality constants are never assumed: they are fitted on calibration
//! bands and then asserted on disjoint holdout bands with fixed headroom.

use crate::error::{Result, SqgError};
use crate::random::{random_spectral, SpectrumShape};
use crate::spectral::{derivative, inverse_transform, lp_norm, Axis, Grid, SpectralField};

/// Headroom applied to fitted constants on holdout data.
pub const HOLDOUT_HEADROOM: f64 = 1.5;

/// `|| |grad u| ||_{L^q}` computed on the grid.
pub fn gradient_norm(u: &SpectralField, q: f64) -> f64 {
    let d1 = inverse_transform(&derivative(u, Axis::X1));
    let d2 = inverse_transform(&derivative(u, Axis::X2));
    let mag: Vec<f64> = d1.values().iter().zip(d2.values()).map(|(a, b)| a.hypot(*b)).collect();
    lp_norm(&mag, u.grid().cell_area(), q)
}

/// Field `L^p` norm on the grid (Parseval for `p = 2`).
pub fn field_lp_norm(u: &SpectralField, p: f64) -> f64 {
    if p == 2.0 {
        u.l2_norm()
    } else {
        inverse_transform(u).lp_norm(p)
    }
}

/// Upper Bernstein ratio `||grad u||_q / (2^{j(1 + 2(1/p - 1/q))} ||u||_p)`.
pub fn upper_ratio(u: &SpectralField, j: i32, p: f64, q: f64) -> Option<f64> {
    let denom = field_lp_norm(u, p);
    if denom == 0.0 {
        return None;
    }
    let expo = j as f64 * (1.0 + 2.0 * (1.0 / p - 1.0 / q));
    Some(gradient_norm(u, q) / (2f64.powf(expo) * denom))
}

/// Two-sided derivative ratio `||grad u||_p / (2^j ||u||_p)`.
pub fn derivative_ratio(u: &SpectralField, j: i32, p: f64) -> Option<f64> {
    let denom = field_lp_norm(u, p);
    if denom == 0.0 {
        return None;
    }
    Some(gradient_norm(u, p) / (2f64.powi(j) * denom))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinReport {
    pub j: i32,
    pub p: f64,
    pub q: f64,
    pub trials: usize,
    pub skipped: usize,
    /// Range of the upper ratio over the trials.
    pub ratio_max: f64,
    pub ratio_min: f64,
    /// Range of the derivative ratio in `L^p`.
    pub derivative_min: f64,
    pub derivative_max: f64,
}

/// Number of lattice modes in the closed annulus `2^{j-1} <= |xi| <= 2^{j+1}`
/// (Nyquist excluded).
pub fn annulus_size(grid: &Grid, j: i32) -> usize {
    let (lo, hi) = annulus(j);
    let n1 = grid.n1();
    (0..grid.len())
        .filter(|&i| {
            let (jj, kk) = (i % n1, i / n1);
            let r = grid.xi_norm(jj, kk);
            !grid.is_nyquist1(jj) && !grid.is_nyquist2(kk) && r >= lo && r <= hi
        })
        .count()
}

fn annulus(j: i32) -> (f64, f64) {
    (2f64.powi(j - 1), 2f64.powi(j + 1))
}

/// Measures Bernstein ratios on `trials` random fields supported in the
/// `j`-th annulus.
pub fn bernstein_check(grid: &Grid, j: i32, p: f64, q: f64, trials: usize, seed: u64) -> Result<BernsteinReport> {
    if !(q >= p && p >= 1.0) {
        return Err(SqgError::InvalidArgument(format!("need 1 <= p <= q, got p = {p}, q = {q}")));
    }
    if j < 0 || annulus_size(grid, j) == 0 {
        return Err(SqgError::EmptyAnnulus { j });
    }
    let (lo, hi) = annulus(j);
    let mut rep = BernsteinReport {
        j,
        p,
        q,
        trials,
        skipped: 0,
        ratio_max: 0.0,
        ratio_min: f64::INFINITY,
        derivative_min: f64::INFINITY,
        derivative_max: 0.0,
    };
    for t in 0..trials {
        let u = random_spectral(grid, seed.wrapping_mul(1_000_003).wrapping_add(t as u64), SpectrumShape::Annulus(lo, hi));
        match (upper_ratio(&u, j, p, q), derivative_ratio(&u, j, p)) {
            (Some(up), Some(d)) => {
                rep.ratio_max = rep.ratio_max.max(up);
                rep.ratio_min = rep.ratio_min.min(up);
                rep.derivative_min = rep.derivative_min.min(d);
                rep.derivative_max = rep.derivative_max.max(d);
            }
            _ => rep.skipped += 1,
        }
    }
    Ok(rep)
}

/// One CSV row `(j, p, q, ratio_max, ratio_min, fitted_C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinRow {
    pub report: BernsteinReport,
    pub fitted_c: f64,
    pub holdout: bool,
    pub pass: bool,
}

impl BernsteinRow {
    pub const CSV_HEADER: &'static str = "j,p,q,ratio_max,ratio_min,fitted_C";

    pub fn to_csv(&self) -> String {
        let r = &self.report;
        format!("{},{},{},{:.12e},{:.12e},{:.12e}", r.j, fmt_p(r.p), fmt_p(r.q), r.ratio_max, r.ratio_min, self.fitted_c)
    }
}

pub(crate) fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

#[derive(Debug, Clone)]
pub struct BernsteinVerdict {
    pub rows: Vec<BernsteinRow>,
    /// Fitted upper constant (max over calibration bands).
    pub fitted_upper: f64,
    /// Fitted lower constant for the derivative ratio (min over calibration).
    pub fitted_lower: f64,
    pub pass: bool,
}

/// Calibration/holdout protocol: fit on `calibration` bands, assert holdout
/// ratios stay within `HOLDOUT_HEADROOM` of the fitted constants.
pub fn bernstein_protocol(
    grid: &Grid,
    calibration: &[i32],
    holdout: &[i32],
    p: f64,
    q: f64,
    trials: usize,
    seed: u64,
) -> Result<BernsteinVerdict> {
    if calibration.iter().any(|j| holdout.contains(j)) {
        return Err(SqgError::InvalidArgument("calibration and holdout bands overlap".into()));
    }
    let calib: Vec<BernsteinReport> = calibration
        .iter()
        .map(|&j| bernstein_check(grid, j, p, q, trials, seed))
        .collect::<Result<_>>()?;
    let fitted_upper = calib.iter().map(|r| r.ratio_max).fold(0.0, f64::max);
    let fitted_lower = calib.iter().map(|r| r.derivative_min).fold(f64::INFINITY, f64::min);
    let mut rows: Vec<BernsteinRow> = calib
        .into_iter()
        .map(|report| BernsteinRow { report, fitted_c: fitted_upper, holdout: false, pass: true })
        .collect();
    for &j in holdout {
        let report = bernstein_check(grid, j, p, q, trials, seed.wrapping_add(7919))?;
        let pass = report.ratio_max <= HOLDOUT_HEADROOM * fitted_upper
            && report.derivative_min >= fitted_lower / HOLDOUT_HEADROOM
            && report.derivative_max <= HOLDOUT_HEADROOM * calib_upper_derivative(&rows);
        rows.push(BernsteinRow { report, fitted_c: fitted_upper, holdout: true, pass });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(BernsteinVerdict { rows, fitted_upper, fitted_lower, pass })
}

fn calib_upper_derivative(rows: &[BernsteinRow]) -> f64 {
    rows.iter().filter(|r| !r.holdout).map(|r| r.report.derivative_max).fold(0.0, f64::max)
}
