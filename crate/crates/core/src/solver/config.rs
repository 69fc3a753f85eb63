use std::fmt;

use crate::error::{Result, SqgError};

/// How `(eps, nu)` are tied together. The dispersive amplitude is always `1/eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingRegime {
    /// `nu` fixed while `eps -> 0`.
    FixedViscosity { epsilon: f64, nu: f64 },
    /// `nu = eps^alpha`.
    Combined { epsilon: f64, alpha: f64 },
}

impl ScalingRegime {
    pub fn fixed(epsilon: f64, nu: f64) -> Result<Self> {
        let r = ScalingRegime::FixedViscosity { epsilon, nu };
        r.validate()?;
        Ok(r)
    }

    pub fn combined(epsilon: f64, alpha: f64) -> Result<Self> {
        let r = ScalingRegime::Combined { epsilon, alpha };
        r.validate()?;
        Ok(r)
    }

    /// `eps` must lie in `(0, 1]`; `nu = 0` is accepted as the inviscid edge case.
    pub fn validate(&self) -> Result<()> {
        let eps = self.epsilon();
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(SqgError::InvalidArgument(format!("epsilon = {eps} must lie in (0, 1]")));
        }
        match *self {
            ScalingRegime::FixedViscosity { nu, .. } if !(nu >= 0.0 && nu.is_finite()) => {
                Err(SqgError::InvalidArgument(format!("nu = {nu} must be finite and >= 0")))
            }
            ScalingRegime::Combined { alpha, .. } if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(SqgError::InvalidArgument(format!("alpha = {alpha} must be finite and > 0")))
            }
            _ => Ok(()),
        }
    }

    pub fn epsilon(&self) -> f64 {
        match *self {
            ScalingRegime::FixedViscosity { epsilon, .. } | ScalingRegime::Combined { epsilon, .. } => epsilon,
        }
    }

    /// Effective viscosity.
    pub fn nu(&self) -> f64 {
        match *self {
            ScalingRegime::FixedViscosity { nu, .. } => nu,
            ScalingRegime::Combined { epsilon, alpha } => epsilon.powf(alpha),
        }
    }

    /// Dispersive amplitude `A = 1/eps`.
    pub fn amplitude(&self) -> f64 {
        1.0 / self.epsilon()
    }

    /// Same scaling law at a different `eps`.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        let r = match *self {
            ScalingRegime::FixedViscosity { nu, .. } => ScalingRegime::FixedViscosity { epsilon, nu },
            ScalingRegime::Combined { alpha, .. } => ScalingRegime::Combined { epsilon, alpha },
        };
        r.validate()?;
        Ok(r)
    }
}

impl fmt::Display for ScalingRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalingRegime::FixedViscosity { epsilon, nu } => write!(f, "fixed(eps={epsilon}, nu={nu})"),
            ScalingRegime::Combined { epsilon, alpha } => write!(f, "combined(eps={epsilon}, alpha={alpha})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Integrator {
    Ifrk2,
    Ifrk4,
}

impl Integrator {
    pub fn order(&self) -> u32 {
        match self {
            Integrator::Ifrk2 => 2,
            Integrator::Ifrk4 => 4,
        }
    }
}

impl std::str::FromStr for Integrator {
    type Err = SqgError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IFRK2" => Ok(Integrator::Ifrk2),
            "IFRK4" => Ok(Integrator::Ifrk4),
            _ => Err(SqgError::InvalidArgument(format!("unknown integrator {s:?}"))),
        }
    }
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Integrator::Ifrk2 => "IFRK2",
            Integrator::Ifrk4 => "IFRK4",
        })
    }
}

/// Time-stepping controls.
///
/// `dt = min(dt_max, cfl * dx / max|u|, eps_dt_factor * eps, t_end - t)`;
/// `eps_dt_factor = None` drops the `eps` cap.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt_max: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub eps_dt_factor: Option<f64>,
    pub dealias: bool,
    /// Steps between recorded samples.
    pub sample_every: usize,
    pub integrator: Integrator,
    /// When false the transport term is dropped (linear runs).
    pub nonlinear: bool,
    /// Samples between stored snapshots.
    pub snapshot_stride: usize,
    /// Sobolev index of the recorded `H^s` norm.
    pub hs_index: f64,
    /// Times in `(0, t_end)` that steps land on exactly; a sample and a
    /// snapshot are always recorded there.
    pub stops: Vec<f64>,
}

/// Smallest admissible step.
pub const DT_FLOOR: f64 = 1e-12;

impl SolverConfig {
    pub fn new(dt_max: f64, t_end: f64) -> Self {
        SolverConfig {
            dt_max,
            t_end,
            cfl: 0.5,
            eps_dt_factor: Some(1.0),
            dealias: true,
            sample_every: 1,
            integrator: Integrator::Ifrk2,
            nonlinear: true,
            snapshot_stride: 1,
            hs_index: 2.5,
            stops: Vec::new(),
        }
    }

    /// Linear-only runs: no transport term and no `eps` cap.
    pub fn linear(dt_max: f64, t_end: f64) -> Self {
        SolverConfig { nonlinear: false, eps_dt_factor: None, ..Self::new(dt_max, t_end) }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SqgError::InvalidArgument(m));
        if !(self.dt_max >= DT_FLOOR && self.dt_max.is_finite()) {
            return bad(format!("dt_max = {} must be finite and >= {DT_FLOOR:e}", self.dt_max));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be finite and >= 0", self.t_end));
        }
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return bad(format!("cfl = {} must be positive", self.cfl));
        }
        if let Some(f) = self.eps_dt_factor {
            if !(f > 0.0 && f.is_finite()) {
                return bad(format!("eps_dt_factor = {f} must be positive"));
            }
        }
        if self.sample_every == 0 || self.snapshot_stride == 0 {
            return bad("sample_every and snapshot_stride must be positive".into());
        }
        if !self.hs_index.is_finite() {
            return bad("hs_index must be finite".into());
        }
        if let Some(s) = self.stops.iter().find(|s| !(**s >= 0.0 && **s <= self.t_end)) {
            return bad(format!("stop time {s} outside [0, {}]", self.t_end));
        }
        Ok(())
    }
}
