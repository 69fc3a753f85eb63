//! Closed-form limit dynamics on zonal (`x1`-independent) profiles.
//!
//! Fast rotation with fixed viscosity: `d_t theta + nu Lambda_2 theta = 0`, with
//! `Lambda_2` the one-dimensional multiplier `|xi2|`. Combined limit
//! (`nu = eps^alpha`): `d_t theta = 0`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Result, SqgError};
use crate::snapshot::Snapshot;
use crate::spectral::{Grid, SpectralField};

/// Coefficients of an `x2`-only profile on the `xi1 = 0` column of a grid,
/// indexed by storage row `kk`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalProfile {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl ZonalProfile {
    pub fn new(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n2() {
            return Err(SqgError::InvalidArgument(format!(
                "zonal profile needs {} coefficients, got {}",
                grid.n2(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(SqgError::InvalidArgument("non-finite zonal coefficient".into()));
        }
        Ok(ZonalProfile { grid: grid.clone(), coeffs })
    }

    pub fn zeros(grid: &Grid) -> Self {
        ZonalProfile { grid: grid.clone(), coeffs: vec![Complex64::new(0.0, 0.0); grid.n2()] }
    }

    /// Samples `f(x2)` on the vertical collocation points.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.n2()).map(|k| f(grid.x2(k))).collect();
        ZonalProfile { grid: grid.clone(), coeffs: grid.forward_vertical(&values) }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Values on the `n2` vertical points.
    pub fn values(&self) -> Vec<f64> {
        self.grid.inverse_vertical(&self.coeffs)
    }

    /// `L^2` norm over the full domain (the profile is constant in `x1`).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.area() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `L^2` norm over `|x2| <= fraction * L2` by the rectangle rule,
    /// including the `L1` length of the horizontal period.
    pub fn l2_norm_on(&self, fraction: f64) -> f64 {
        region_l2(&self.grid, &self.values(), fraction)
    }

    pub fn sub(&self, other: &ZonalProfile) -> Result<ZonalProfile> {
        if self.grid != other.grid {
            return Err(SqgError::GridMismatch {
                left: self.grid.spec().to_string(),
                right: other.grid.spec().to_string(),
            });
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(ZonalProfile { grid: self.grid.clone(), coeffs })
    }

    /// CSV rows `k,Re,Im` in storage order, `k` the signed vertical index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,Re,Im\n");
        for (kk, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{},{:.17e},{:.17e}", self.grid.k_of(kk), c.re, c.im);
        }
        out
    }

    pub fn from_csv(grid: &Grid, text: &str) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.n2()];
        let mut seen = vec![false; grid.n2()];
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("k,Re,Im") {
            return Err(SqgError::Format("missing header k,Re,Im".into()));
        }
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let parts: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| SqgError::Format(format!("{line}: {e}")));
            if parts.len() != 3 {
                return Err(SqgError::Format(format!("expected 3 fields: {line}")));
            }
            let k: i64 = parts[0].trim().parse().map_err(|e| SqgError::Format(format!("{line}: {e}")))?;
            let idx = grid.mode_index(0, k).ok_or_else(|| SqgError::Format(format!("k = {k} off grid")))?;
            let kk = idx / grid.n1();
            coeffs[kk] = Complex64::new(parse(parts[1])?, parse(parts[2])?);
            seen[kk] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(SqgError::Format("missing rows".into()));
        }
        Self::new(grid, coeffs)
    }

    /// Degenerate snapshot with `n1 = 1` holding the profile values.
    pub fn to_snapshot(&self) -> Snapshot {
        let s = self.grid.spec();
        Snapshot { n1: 1, n2: s.n2, l1: s.l1, l2: s.l2, values: self.values() }
    }

    /// Reads a degenerate snapshot back onto `grid` (which supplies `n1`).
    pub fn from_snapshot(grid: &Grid, snap: &Snapshot) -> Result<Self> {
        let s = grid.spec();
        if snap.n1 != 1 || snap.n2 != s.n2 || snap.l1 != s.l1 || snap.l2 != s.l2 {
            return Err(SqgError::Format(format!(
                "snapshot {}x{} (L1 = {}, L2 = {}) is not a zonal profile for {s}",
                snap.n1, snap.n2, snap.l1, snap.l2
            )));
        }
        Self::new(grid, grid.forward_vertical(&snap.values))
    }
}

/// Rectangle-rule `L^2(K)` norm of an `x2` profile over `K = (0, L1) x {|x2| <= fraction L2}`.
pub fn region_l2(grid: &Grid, values: &[f64], fraction: f64) -> f64 {
    let cut = fraction * grid.l2() * (1.0 + 1e-14);
    let sum: f64 = values
        .iter()
        .enumerate()
        .filter(|(k, _)| grid.x2(*k).abs() <= cut)
        .map(|(_, v)| v * v)
        .sum();
    (sum * grid.h2() * grid.l1()).sqrt()
}

/// `xi1 = 0` column of `g`, i.e. its horizontal mean.
pub fn project_to_zonal(g: &SpectralField) -> ZonalProfile {
    let n1 = g.grid().n1();
    ZonalProfile { grid: g.grid().clone(), coeffs: g.coeffs().iter().step_by(n1).copied().collect() }
}

/// The `x1`-constant field carrying `p`.
pub fn embed_zonal(p: &ZonalProfile) -> SpectralField {
    let g = &p.grid;
    let n1 = g.n1();
    let coeffs: Vec<Complex64> = (0..g.len())
        .map(|i| if i % n1 == 0 { p.coeffs[i / n1] } else { Complex64::new(0.0, 0.0) })
        .collect();
    SpectralField::new(g.clone(), coeffs).expect("finite coefficients")
}

/// `exp(-nu |xi2| t)` applied per coefficient.
pub fn evolve_fast_rotation_limit(p: &ZonalProfile, nu: f64, t: f64) -> Result<ZonalProfile> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(SqgError::InvalidArgument(format!("t = {t} must be finite and >= 0")));
    }
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(SqgError::InvalidArgument(format!("nu = {nu} must be finite and >= 0")));
    }
    let g = &p.grid;
    let coeffs = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(kk, c)| c * (-nu * g.xi2(kk).abs() * t).exp())
        .collect();
    Ok(ZonalProfile { grid: g.clone(), coeffs })
}

/// Frozen dynamics: the profile is returned unchanged.
pub fn evolve_combined_limit(p: &ZonalProfile, _t: f64) -> ZonalProfile {
    p.clone()
}

/// Which limit model a sweep is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitModel {
    FastRotation { nu: f64 },
    Frozen,
}

impl LimitModel {
    pub fn evolve(&self, p: &ZonalProfile, t: f64) -> Result<ZonalProfile> {
        match *self {
            LimitModel::FastRotation { nu } => evolve_fast_rotation_limit(p, nu, t),
            LimitModel::Frozen => Ok(evolve_combined_limit(p, t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_spectral, SpectrumShape};
    use crate::spectral::{horizontal_mean, GridSpec};
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(GridSpec::new(8, 32, 2.0 * PI, PI).unwrap()).unwrap()
    }

    fn random_profile(seed: u64) -> ZonalProfile {
        project_to_zonal(&random_spectral(&grid(), seed, SpectrumShape::Decay(1.0)))
    }

    #[test]
    fn time_zero_is_identity_and_unit_mode_decays() {
        let p = random_profile(1);
        assert_eq!(evolve_fast_rotation_limit(&p, 0.8, 0.0).unwrap(), p);
        let g = grid();
        let mode = ZonalProfile::from_fn(&g, |x2| x2.cos());
        let out = evolve_fast_rotation_limit(&mode, 0.3, 2.0).unwrap();
        let want: Vec<f64> = mode.values().iter().map(|v| v * (-0.6f64).exp()).collect();
        for (a, b) in out.values().iter().zip(&want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(evolve_fast_rotation_limit(&p, 0.3, -1.0).is_err());
    }

    #[test]
    fn semigroup_property() {
        let p = random_profile(2);
        let a = evolve_fast_rotation_limit(&evolve_fast_rotation_limit(&p, 0.5, 0.3).unwrap(), 0.5, 0.9).unwrap();
        let b = evolve_fast_rotation_limit(&p, 0.5, 1.2).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() <= 1e-14 * p.coeffs().iter().fold(0.0f64, |m, c| m.max(c.norm())));
        }
    }

    #[test]
    fn contraction_is_strict_for_nonconstant_profiles() {
        let p = random_profile(3);
        let out = evolve_fast_rotation_limit(&p, 0.4, 1.0).unwrap();
        assert!(out.l2_norm() < p.l2_norm());
        let c = ZonalProfile::from_fn(&grid(), |_| 2.0);
        assert!((evolve_fast_rotation_limit(&c, 0.4, 1.0).unwrap().l2_norm() - c.l2_norm()).abs() < 1e-13);
    }

    #[test]
    fn frozen_limit_is_identity() {
        let p = random_profile(4);
        assert_eq!(evolve_combined_limit(&p, 7.3), p);
        let z = ZonalProfile::zeros(&grid());
        assert_eq!(evolve_combined_limit(&z, 1.0), z);
        assert_eq!(evolve_fast_rotation_limit(&p, 0.0, 7.3).unwrap(), evolve_combined_limit(&p, 7.3));
    }

    #[test]
    fn projection_is_a_retraction() {
        let g = grid();
        let f = random_spectral(&g, 5, SpectrumShape::White);
        let z = horizontal_mean(&f);
        assert_eq!(embed_zonal(&project_to_zonal(&z)), z);
        assert!(project_to_zonal(&f).l2_norm() < f.l2_norm());
        assert!((project_to_zonal(&z).l2_norm() - z.l2_norm()).abs() <= 1e-14 * z.l2_norm());
        let cosine = crate::spectral::forward_transform(&crate::spectral::PhysicalField::from_fn(&g, |x1, x2| {
            x1.cos() * (-x2 * x2).exp()
        }))
        .unwrap();
        assert!(project_to_zonal(&cosine).l2_norm() < 1e-15);
    }

    #[test]
    fn evolutions_commute_with_projection() {
        let g = grid();
        let f = random_spectral(&g, 6, SpectrumShape::Decay(1.0));
        let p = project_to_zonal(&f);
        let round = project_to_zonal(&embed_zonal(&p));
        assert_eq!(
            evolve_fast_rotation_limit(&round, 0.2, 0.5).unwrap(),
            project_to_zonal(&embed_zonal(&evolve_fast_rotation_limit(&p, 0.2, 0.5).unwrap()))
        );
    }

    #[test]
    fn csv_and_snapshot_forms() {
        let g = grid();
        let p = random_profile(7);
        let csv = p.to_csv();
        assert!(csv.starts_with("k,Re,Im\n0,"));
        assert_eq!(ZonalProfile::from_csv(&g, &csv).unwrap(), p);
        let snap = p.to_snapshot();
        assert_eq!(snap.n1, 1);
        let back = Snapshot::decode(&snap.encode()).unwrap();
        let q = ZonalProfile::from_snapshot(&g, &back).unwrap();
        for (a, b) in q.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!(ZonalProfile::from_csv(&g, "k,Re,Im\n0,1,0\n").is_err());
    }
}
