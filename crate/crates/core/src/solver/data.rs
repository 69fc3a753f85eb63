//! Ill-prepared initial data: a zonal profile plus an `O(1)` oscillation with
//! zero horizontal mean.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SqgError};
use crate::random::rng;
use crate::spectral::{drop_nyquist, forward_transform, horizontal_mean, inverse_transform, Grid, PhysicalField, SpectralField};

/// Outer fraction of the vertical strip where the data must have decayed.
pub const DECAY_FRACTION: f64 = 0.1;
/// Largest admissible `max |theta|` in that region, relative to the global maximum.
pub const DECAY_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZonalShape {
    /// `exp(-x2^2 / (2 w^2))`.
    Gaussian,
    /// No mean part.
    Zero,
}

impl std::str::FromStr for ZonalShape {
    type Err = SqgError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(ZonalShape::Gaussian),
            "zero" => Ok(ZonalShape::Zero),
            _ => Err(SqgError::InvalidArgument(format!("unknown profile {s:?} (expected gaussian|zero)"))),
        }
    }
}

impl std::fmt::Display for ZonalShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ZonalShape::Gaussian => "gaussian",
            ZonalShape::Zero => "zero",
        })
    }
}

/// `theta_0 = scale * (bar_theta_0 + amp_eff * oscillation)` with
/// `amp_eff = amp * eps^amp_exponent` (just `amp` when no exponent is set).
///
/// The oscillation is `sum_{m=1..modes} g_m(x2) (a_m cos(m k x1) + b_m sin(m k x1))`,
/// `k = 2 pi / L1`, with Gaussian envelopes `g_m` of width `width` centred at
/// seeded offsets in `[-width/2, width/2]`, normalized to unit maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct IllPreparedFamily {
    pub profile: ZonalShape,
    pub amp: f64,
    pub seed: u64,
    pub scale: f64,
    pub width: f64,
    pub modes: u32,
    pub amp_exponent: Option<f64>,
}

impl Default for IllPreparedFamily {
    fn default() -> Self {
        IllPreparedFamily {
            profile: ZonalShape::Gaussian,
            amp: 1.0,
            seed: 0,
            scale: 1.0,
            width: 2.0,
            modes: 3,
            amp_exponent: None,
        }
    }
}

impl IllPreparedFamily {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SqgError::InvalidArgument(m));
        if !self.amp.is_finite() || !self.scale.is_finite() {
            return bad("amp and scale must be finite".into());
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return bad(format!("width = {} must be positive", self.width));
        }
        if let Some(e) = self.amp_exponent {
            if !(e >= 0.0 && e.is_finite()) {
                return bad(format!("amp_exponent = {e} must be >= 0 for a uniform L2 bound"));
            }
        }
        Ok(())
    }

    /// The zonal part `scale * bar_theta_0`.
    pub fn mean_profile(&self, grid: &Grid) -> Result<SpectralField> {
        let w = self.width;
        let s = self.scale;
        let f = match self.profile {
            ZonalShape::Gaussian => PhysicalField::from_fn(grid, |_, x2| s * (-x2 * x2 / (2.0 * w * w)).exp()),
            ZonalShape::Zero => PhysicalField::zeros(grid),
        };
        Ok(horizontal_mean(&drop_nyquist(&forward_transform(&f)?)))
    }

    /// The unscaled oscillation, exactly free of `xi1 = 0` content.
    pub fn oscillation(&self, grid: &Grid) -> Result<SpectralField> {
        let mut r = rng(self.seed);
        let w = self.width;
        let k = 2.0 * std::f64::consts::PI / grid.l1();
        let terms: Vec<(f64, f64, f64, f64)> = (1..=self.modes)
            .map(|m| {
                let a: f64 = r.sample(StandardNormal);
                let b: f64 = r.sample(StandardNormal);
                let c = w * (r.gen::<f64>() - 0.5);
                (m as f64 * k, a, b, c)
            })
            .collect();
        let f = PhysicalField::from_fn(grid, |x1, x2| {
            terms
                .iter()
                .map(|&(q, a, b, c)| (-(x2 - c) * (x2 - c) / (2.0 * w * w)).exp() * (a * (q * x1).cos() + b * (q * x1).sin()))
                .sum()
        });
        let peak = f.max_abs();
        let g = drop_nyquist(&forward_transform(&f)?);
        let g = g.sub(&horizontal_mean(&g))?;
        Ok(if peak > 0.0 { g.scale(1.0 / peak) } else { g })
    }

    /// Effective oscillation amplitude at `eps`.
    pub fn amp_at(&self, epsilon: f64) -> f64 {
        match self.amp_exponent {
            Some(e) => self.amp * epsilon.powf(e),
            None => self.amp,
        }
    }

    /// Uniform bound `||bar||_{L^2} + scale |amp| ||osc||_{L^2}` on `||theta_{0,eps}||_{L^2}`.
    pub fn l2_bound(&self, grid: &Grid) -> Result<f64> {
        Ok(self.mean_profile(grid)?.l2_norm() + (self.scale * self.amp).abs() * self.oscillation(grid)?.l2_norm())
    }
}

/// `theta_{0,eps}` rendered on `grid`; fails if the data has not decayed in
/// the outer tenth of the vertical strip.
pub fn make_ill_prepared_data(family: &IllPreparedFamily, epsilon: f64, grid: &Grid) -> Result<SpectralField> {
    family.validate()?;
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(SqgError::InvalidArgument(format!("epsilon = {epsilon} must lie in (0, 1]")));
    }
    let mean = family.mean_profile(grid)?;
    let osc = family.oscillation(grid)?;
    let theta = mean.axpy(family.scale * family.amp_at(epsilon), &osc)?;
    let fraction = boundary_decay(&theta);
    if fraction >= DECAY_LIMIT {
        return Err(SqgError::InsufficientDecay { fraction, limit: DECAY_LIMIT });
    }
    Ok(theta)
}

/// `max |theta|` over `|x2| > (1 - DECAY_FRACTION) L2`, relative to `max |theta|`.
pub fn boundary_decay(theta: &SpectralField) -> f64 {
    let f = inverse_transform(theta);
    let g = theta.grid();
    let cut = (1.0 - DECAY_FRACTION) * g.l2();
    let peak = f.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    let outer = f
        .values()
        .chunks(g.n1())
        .enumerate()
        .filter(|(k, _)| g.x2(*k).abs() > cut)
        .flat_map(|(_, row)| row.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    outer / peak
}
