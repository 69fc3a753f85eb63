//! Transforms and Fourier-multiplier operators.
//!
//! Odd symbols (derivatives, Riesz transforms) vanish on the Nyquist row or
//! column of their own axis: the Nyquist mode is its own mirror, so any odd
//! symbol there would break conjugate symmetry.

use num_complex::Complex64;

use super::field::{PhysicalField, SpectralField};
use super::grid::Grid;
use crate::error::{Result, SqgError};

/// Zero-mode magnitude below which a field counts as mean-free.
pub const MEAN_FREE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Axis::X1),
            2 => Ok(Axis::X2),
            _ => Err(SqgError::InvalidArgument(format!("axis must be 1 or 2, got {i}"))),
        }
    }
}

pub fn forward_transform(f: &PhysicalField) -> Result<SpectralField> {
    if let Some(index) = f.values().iter().position(|v| !v.is_finite()) {
        return Err(SqgError::NonFinite { index });
    }
    let coeffs = f.grid().forward(f.values());
    Ok(SpectralField::from_raw(f.grid().clone(), coeffs))
}

pub fn inverse_transform(g: &SpectralField) -> PhysicalField {
    PhysicalField::from_raw(g.grid().clone(), g.grid().inverse(g.coeffs()))
}

/// Symbol `i xi_axis` of the spectral derivative.
#[inline]
pub fn derivative_symbol(grid: &Grid, axis: Axis, jj: usize, kk: usize) -> Complex64 {
    match axis {
        Axis::X1 if !grid.is_nyquist1(jj) => Complex64::new(0.0, grid.xi1(jj)),
        Axis::X2 if !grid.is_nyquist2(kk) => Complex64::new(0.0, grid.xi2(kk)),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Symbol `i xi_axis / |xi|` of the Riesz transform, zero at the origin.
#[inline]
pub fn riesz_symbol(grid: &Grid, axis: Axis, jj: usize, kk: usize) -> Complex64 {
    if jj == 0 && kk == 0 {
        return Complex64::new(0.0, 0.0);
    }
    derivative_symbol(grid, axis, jj, kk) / grid.xi_norm(jj, kk)
}

/// `Lambda^s`: multiplies by `|xi|^s`; the zero mode always maps to zero.
pub fn fractional_laplacian(g: &SpectralField, s: f64) -> Result<SpectralField> {
    if s < 0.0 && g.zero_mode().norm() > MEAN_FREE_TOL {
        return Err(SqgError::NonMeanFree { zero_mode: g.zero_mode().norm() });
    }
    let grid = g.grid().clone();
    Ok(g.apply_symbol(|jj, kk| {
        if jj == 0 && kk == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(grid.xi_norm(jj, kk).powf(s), 0.0)
        }
    }))
}

pub fn riesz(g: &SpectralField, axis: Axis) -> SpectralField {
    let grid = g.grid().clone();
    g.apply_symbol(|jj, kk| riesz_symbol(&grid, axis, jj, kk))
}

pub fn derivative(g: &SpectralField, axis: Axis) -> SpectralField {
    let grid = g.grid().clone();
    g.apply_symbol(|jj, kk| derivative_symbol(&grid, axis, jj, kk))
}

/// `u = R^perp theta = (-R2 theta, R1 theta)`.
pub fn velocity_from_theta(g: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = g.grid().clone();
    let u1 = g.apply_symbol(|jj, kk| -riesz_symbol(&grid, Axis::X2, jj, kk));
    let u2 = riesz(g, Axis::X1);
    (u1, u2)
}

/// Spectral divergence `d1 u1 + d2 u2`.
pub fn divergence(u1: &SpectralField, u2: &SpectralField) -> Result<SpectralField> {
    derivative(u1, Axis::X1).add(&derivative(u2, Axis::X2))
}

/// Keeps only the `xi1 = 0` column: the average over `x1` with measure `dx1 / L1`.
pub fn horizontal_mean(g: &SpectralField) -> SpectralField {
    g.apply_symbol(|jj, _| if jj == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// Two-thirds rule: a mode survives iff `3|j| < n1` and `3|k| < n2`.
///
/// The strict inequality keeps the retained band alias-free for quadratic
/// products on every even grid size, including multiples of three.
#[inline]
pub fn dealias_keeps(grid: &Grid, jj: usize, kk: usize) -> bool {
    3 * grid.j_of(jj).unsigned_abs() < grid.n1() as u64 && 3 * grid.k_of(kk).unsigned_abs() < grid.n2() as u64
}

pub fn dealias(g: &SpectralField) -> SpectralField {
    let grid = g.grid().clone();
    g.apply_symbol(|jj, kk| {
        if dealias_keeps(&grid, jj, kk) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Zeroes the Nyquist row and column.
pub fn drop_nyquist(g: &SpectralField) -> SpectralField {
    let grid = g.grid().clone();
    g.apply_symbol(|jj, kk| {
        if grid.is_nyquist1(jj) || grid.is_nyquist2(kk) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Pointwise product of two spectral fields evaluated on the grid.
pub fn pseudo_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.grid().ensure_same(b.grid())?;
    let pa = inverse_transform(a);
    let pb = inverse_transform(b);
    forward_transform(&pa.mul(&pb)?)
}
