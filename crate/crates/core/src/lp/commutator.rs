//! The transport commutator `[u . grad, Delta_j] theta` and a measured
//! version of its block-wise bound.

use super::family::{dyadic_block, DyadicFamily};
use crate::error::{Result, SqgError};
use crate::random::{random_spectral, SpectrumShape};
use crate::spectral::{
    dealias, derivative, forward_transform, inverse_transform, velocity_from_theta, Axis, PhysicalField, SpectralField,
};

/// Dealiased `u . grad theta` with `u` given on the grid.
pub fn transport(u: (&PhysicalField, &PhysicalField), theta: &SpectralField) -> Result<SpectralField> {
    let grid = theta.grid();
    for c in [u.0, u.1] {
        if c.grid() != grid {
            return Err(SqgError::GridMismatch { left: c.grid().spec().to_string(), right: grid.spec().to_string() });
        }
    }
    let th = dealias(theta);
    let u1 = inverse_transform(&dealias(&forward_transform(u.0)?));
    let u2 = inverse_transform(&dealias(&forward_transform(u.1)?));
    let d1 = inverse_transform(&derivative(&th, Axis::X1));
    let d2 = inverse_transform(&derivative(&th, Axis::X2));
    let vals: Vec<f64> = (0..grid.len())
        .map(|i| u1.values()[i] * d1.values()[i] + u2.values()[i] * d2.values()[i])
        .collect();
    Ok(dealias(&forward_transform(&PhysicalField::new(grid.clone(), vals)?)?))
}

/// `Delta_j (u . grad theta) - u . grad (Delta_j theta)`.
pub fn commutator_block(
    u: (&PhysicalField, &PhysicalField),
    theta: &SpectralField,
    j: i32,
    fam: &DyadicFamily,
) -> Result<SpectralField> {
    let whole = dyadic_block(&transport(u, theta)?, j, fam)?;
    let local = transport(u, &dyadic_block(theta, j, fam)?)?;
    whole.sub(&local)
}

/// Raw ratios `c_j = ||[u.grad, Delta_j] theta||_{L^2} / M` for
/// `j = -1..=jmax`, with `M = ||theta||_inf ||u||_{H^s} + ||theta||_{H^s} ||u||_inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorProfile {
    pub s: f64,
    pub ratios: Vec<f64>,
    /// `l^2` norm of `ratios`; dividing by it puts the sequence on the unit sphere.
    pub l2: f64,
}

impl CommutatorProfile {
    pub fn normalized(&self) -> Vec<f64> {
        if self.l2 == 0.0 {
            return self.ratios.clone();
        }
        self.ratios.iter().map(|c| c / self.l2).collect()
    }
}

pub fn commutator_profile(
    u: (&PhysicalField, &PhysicalField),
    theta: &SpectralField,
    s: f64,
    fam: &DyadicFamily,
) -> Result<CommutatorProfile> {
    let uh1 = forward_transform(u.0)?;
    let uh2 = forward_transform(u.1)?;
    let u_hs = uh1.sobolev_norm(s).hypot(uh2.sobolev_norm(s));
    let u_inf = u.0.values().iter().zip(u.1.values()).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max);
    let theta_inf = inverse_transform(theta).max_abs();
    let scale = theta_inf * u_hs + theta.sobolev_norm(s) * u_inf;
    let ratios = (-1..=fam.jmax())
        .map(|j| {
            let c = commutator_block(u, theta, j, fam)?.l2_norm();
            Ok(if scale > 0.0 { c / scale } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;
    let l2 = ratios.iter().map(|c| c * c).sum::<f64>().sqrt();
    Ok(CommutatorProfile { s, ratios, l2 })
}

/// Random SQG-type state: smooth `theta` and `u = R^perp theta`.
pub fn random_transport_state(fam: &DyadicFamily, seed: u64, decay: f64) -> (SpectralField, PhysicalField, PhysicalField) {
    let theta = random_spectral(fam.grid(), seed, SpectrumShape::Decay(decay));
    let (u1, u2) = velocity_from_theta(&theta);
    (theta, inverse_transform(&u1), inverse_transform(&u2))
}

/// Calibration/holdout fit of the commutator constant.
#[derive(Debug, Clone)]
pub struct CommutatorFit {
    pub profiles: Vec<CommutatorProfile>,
    /// `C = max` of the `l^2` norms over the calibration states.
    pub fitted_c: f64,
    pub calibration: usize,
    /// Largest holdout `l^2` norm divided by `fitted_c`.
    pub holdout_ratio: f64,
    pub pass: bool,
}

impl CommutatorFit {
    pub const CSV_HEADER: &'static str = super::bernstein::BernsteinRow::CSV_HEADER;

    /// Rows `(j, p, q, ratio_max, ratio_min, fitted_C)` with `p = q = 2`,
    /// extremes taken over all states.
    pub fn csv_rows(&self) -> Vec<String> {
        let nj = self.profiles.first().map_or(0, |p| p.ratios.len());
        (0..nj)
            .map(|b| {
                let vals = self.profiles.iter().map(|p| p.ratios[b]);
                let hi = vals.clone().fold(0.0, f64::max);
                let lo = vals.fold(f64::INFINITY, f64::min);
                format!("{},2,2,{:.12e},{:.12e},{:.12e}", b as i32 - 1, hi, lo, self.fitted_c)
            })
            .collect()
    }
}

/// Measures profiles on `states` random states; the first half calibrates `C`,
/// the rest must satisfy `l2 <= headroom * C`.
pub fn commutator_fit(fam: &DyadicFamily, s: f64, states: usize, seed: u64, headroom: f64) -> Result<CommutatorFit> {
    if states < 2 {
        return Err(SqgError::InvalidArgument("need at least two states".into()));
    }
    let profiles = (0..states)
        .map(|i| {
            let (theta, u1, u2) = random_transport_state(fam, seed.wrapping_add(i as u64), s + 1.5);
            commutator_profile((&u1, &u2), &theta, s, fam)
        })
        .collect::<Result<Vec<_>>>()?;
    let calibration = states / 2;
    let fitted_c = profiles[..calibration].iter().map(|p| p.l2).fold(0.0, f64::max);
    let holdout_max = profiles[calibration..].iter().map(|p| p.l2).fold(0.0, f64::max);
    let holdout_ratio = if fitted_c > 0.0 { holdout_max / fitted_c } else { f64::INFINITY };
    Ok(CommutatorFit { profiles, fitted_c, calibration, holdout_ratio, pass: holdout_ratio <= headroom })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, GridSpec};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn family(n: usize) -> DyadicFamily {
        DyadicFamily::new(&Grid::new(GridSpec::new(n, n, 2.0 * PI, PI).unwrap()).unwrap())
    }

    #[test]
    fn zero_velocity_gives_zero() {
        let fam = family(32);
        let theta = random_spectral(fam.grid(), 3, SpectrumShape::Decay(2.0));
        let z = PhysicalField::zeros(fam.grid());
        for j in -1..=fam.jmax() {
            assert_eq!(commutator_block((&z, &z), &theta, j, &fam).unwrap().max_coeff_abs(), 0.0);
        }
    }

    #[test]
    fn constant_velocity_commutes() {
        let fam = family(32);
        let theta = SpectralField::single_mode(fam.grid(), 3, 2, Complex64::new(1.0, -0.5))
            .unwrap()
            .add(&SpectralField::single_mode(fam.grid(), -2, 4, Complex64::new(0.3, 0.2)).unwrap())
            .unwrap();
        let a = PhysicalField::constant(fam.grid(), 0.7);
        let b = PhysicalField::constant(fam.grid(), -1.3);
        let scale = transport((&a, &b), &theta).unwrap().l2_norm();
        for j in -1..=fam.jmax() {
            let c = commutator_block((&a, &b), &theta, j, &fam).unwrap();
            assert!(c.l2_norm() <= 1e-12 * scale, "j = {j}");
        }
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let fam = family(16);
        let other = Grid::new(GridSpec::new(32, 32, 2.0 * PI, PI).unwrap()).unwrap();
        let z = PhysicalField::zeros(&other);
        let theta = SpectralField::zeros(fam.grid());
        assert!(matches!(commutator_block((&z, &z), &theta, 0, &fam), Err(SqgError::GridMismatch { .. })));
    }

    #[test]
    fn fitted_constant_is_stable() {
        let fam = family(32);
        let fit = commutator_fit(&fam, 2.5, 20, 11, 1.5).unwrap();
        assert!(fit.pass, "holdout ratio {}", fit.holdout_ratio);
        for p in &fit.profiles {
            let n: f64 = p.normalized().iter().map(|c| c * c).sum();
            assert!((n - 1.0).abs() < 1e-12);
            assert!(p.l2 <= 1.5 * fit.fitted_c);
        }
        assert_eq!(fit.csv_rows().len() as i32, fam.jmax() + 2);
    }
}
