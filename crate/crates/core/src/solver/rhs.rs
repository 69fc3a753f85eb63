//! Right-hand side pieces and the integrating-factor steps.

use num_complex::Complex64;

use super::config::{Integrator, ScalingRegime, SolverConfig};
use crate::error::{Result, SqgError};
use crate::spectral::{
    dealias, derivative_symbol, forward_transform, inverse_transform, riesz_symbol, velocity_from_theta, Axis, Grid,
    PhysicalField, SpectralField,
};

/// `lambda(xi) = nu |xi| + (1/eps) i xi1 / |xi|`, so that the linear part reads
/// `d_t theta_hat = -lambda theta_hat`.
pub fn linear_symbol(grid: &Grid, regime: &ScalingRegime) -> Vec<Complex64> {
    let (nu, amp) = (regime.nu(), regime.amplitude());
    let n1 = grid.n1();
    (0..grid.len())
        .map(|i| {
            let (jj, kk) = (i % n1, i / n1);
            Complex64::new(nu * grid.xi_norm(jj, kk), 0.0) + riesz_symbol(grid, Axis::X1, jj, kk) * amp
        })
        .collect()
}

/// `div(theta u)` with `u = R^perp theta`, plus `max |u|` on the grid.
///
/// With `dealias` the input is truncated to the two-thirds band before the
/// product and the result is truncated again, which makes the term exactly
/// energy-neutral: `<theta, N(theta)> = 0`.
pub fn transport_term(theta: &SpectralField, dealias_on: bool) -> Result<(SpectralField, f64)> {
    if !theta.is_finite() {
        return Err(SqgError::RegularityLoss { t: f64::NAN });
    }
    let grid = theta.grid();
    let th = if dealias_on { dealias(theta) } else { theta.clone() };
    let (u1, u2) = velocity_from_theta(&th);
    let p = inverse_transform(&th);
    let (p1, p2) = (inverse_transform(&u1), inverse_transform(&u2));
    let mut umax: f64 = 0.0;
    let n = grid.len();
    let (mut f1, mut f2) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for ((&t, &a), &b) in p.values().iter().zip(p1.values()).zip(p2.values()) {
        umax = umax.max(a.hypot(b));
        f1.push(t * a);
        f2.push(t * b);
    }
    let loss = |_| SqgError::RegularityLoss { t: f64::NAN };
    let h1 = forward_transform(&PhysicalField::new(grid.clone(), f1).map_err(loss)?).map_err(loss)?;
    let h2 = forward_transform(&PhysicalField::new(grid.clone(), f2).map_err(loss)?).map_err(loss)?;
    let n1 = grid.n1();
    let coeffs: Vec<Complex64> = h1
        .coeffs()
        .iter()
        .zip(h2.coeffs())
        .enumerate()
        .map(|(i, (a, b))| {
            let (jj, kk) = (i % n1, i / n1);
            a * derivative_symbol(grid, Axis::X1, jj, kk) + b * derivative_symbol(grid, Axis::X2, jj, kk)
        })
        .collect();
    let div = SpectralField::new(grid.clone(), coeffs).map_err(|_| SqgError::RegularityLoss { t: f64::NAN })?;
    if !umax.is_finite() {
        return Err(SqgError::RegularityLoss { t: f64::NAN });
    }
    Ok((if dealias_on { dealias(&div) } else { div }, umax))
}

/// Dealiased `div(theta R^perp theta)`. Non-finite values report a regularity
/// loss whose time is filled in by the caller (NaN here).
pub fn nonlinear_term(theta: &SpectralField) -> Result<SpectralField> {
    transport_term(theta, true).map(|(n, _)| n)
}

/// One integrating-factor step driven by a cached linear symbol.
pub(crate) struct Stepper {
    lambda: Vec<Complex64>,
    integrator: Integrator,
    dealias: bool,
    nonlinear: bool,
}

fn lincomb(terms: &[(Complex64, &SpectralField)], grid: &Grid, weights: Option<&[Complex64]>) -> SpectralField {
    let n = grid.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (c, f) in terms {
        for (o, v) in out.iter_mut().zip(f.coeffs()) {
            *o += c * v;
        }
    }
    if let Some(w) = weights {
        for (o, w) in out.iter_mut().zip(w) {
            *o *= w;
        }
    }
    SpectralField::from_raw(grid.clone(), out)
}

impl Stepper {
    pub(crate) fn new(grid: &Grid, regime: &ScalingRegime, config: &SolverConfig) -> Self {
        Stepper {
            lambda: linear_symbol(grid, regime),
            integrator: config.integrator,
            dealias: config.dealias,
            nonlinear: config.nonlinear,
        }
    }

    /// `-div(theta u)` and `max|u|`; zero when the transport term is off.
    pub(crate) fn rhs(&self, theta: &SpectralField) -> Result<(SpectralField, f64)> {
        if !self.nonlinear {
            if !theta.is_finite() {
                return Err(SqgError::RegularityLoss { t: f64::NAN });
            }
            return Ok((SpectralField::zeros(theta.grid()), 0.0));
        }
        let (n, umax) = transport_term(theta, self.dealias)?;
        Ok((n.scale(-1.0), umax))
    }

    /// Advances by `dt`, given `k1 = rhs(theta)`.
    pub(crate) fn advance(&self, theta: &SpectralField, k1: &SpectralField, dt: f64) -> Result<SpectralField> {
        let grid = theta.grid();
        let one = Complex64::new(1.0, 0.0);
        let e: Vec<Complex64> = self.lambda.iter().map(|l| (-l * dt).exp()).collect();
        if !self.nonlinear {
            return Ok(lincomb(&[(one, theta)], grid, Some(&e)));
        }
        let h = Complex64::new(dt, 0.0);
        let out = match self.integrator {
            Integrator::Ifrk2 => {
                // Heun in the interaction picture
                let pred = lincomb(&[(one, theta), (h, k1)], grid, Some(&e));
                let (k2, _) = self.rhs(&pred)?;
                let base = lincomb(&[(one, theta), (h * 0.5, k1)], grid, Some(&e));
                lincomb(&[(one, &base), (h * 0.5, &k2)], grid, None)
            }
            Integrator::Ifrk4 => {
                let eh: Vec<Complex64> = self.lambda.iter().map(|l| (-l * (0.5 * dt)).exp()).collect();
                let a = lincomb(&[(one, theta), (h * 0.5, k1)], grid, Some(&eh));
                let (k2, _) = self.rhs(&a)?;
                let th_h = lincomb(&[(one, theta)], grid, Some(&eh));
                let b = lincomb(&[(one, &th_h), (h * 0.5, &k2)], grid, None);
                let (k3, _) = self.rhs(&b)?;
                let c = lincomb(&[(one, &th_h), (h, &k3)], grid, Some(&eh));
                let (k4, _) = self.rhs(&c)?;
                // E theta + dt/6 (E k1 + 2 E_h (k2 + k3) + k4)
                let mid = lincomb(&[(one, theta), (h / 6.0, k1)], grid, Some(&eh));
                let mid = lincomb(&[(one, &mid), (h / 3.0, &k2), (h / 3.0, &k3)], grid, Some(&eh));
                lincomb(&[(one, &mid), (h / 6.0, &k4)], grid, None)
            }
        };
        if !out.is_finite() {
            return Err(SqgError::RegularityLoss { t: f64::NAN });
        }
        Ok(out)
    }
}

/// A single step of size `dt` from `theta`.
pub fn step(theta: &SpectralField, dt: f64, regime: &ScalingRegime, config: &SolverConfig) -> Result<SpectralField> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SqgError::InvalidArgument(format!("dt = {dt} must be positive")));
    }
    regime.validate()?;
    let s = Stepper::new(theta.grid(), regime, config);
    let (k1, _) = s.rhs(theta)?;
    s.advance(theta, &k1, dt)
}
