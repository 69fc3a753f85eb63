//! Versioned JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sqg_core::diagnostics::DEFAULT_K_FRACTION;
use sqg_core::solver::{IllPreparedFamily, Integrator, ScalingRegime, SolverConfig, ZonalShape};
use sqg_core::spectral::{Grid, GridSpec, DEFAULT_L1, DEFAULT_L2};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest admissible fraction of `||theta||^2` in the outer strip
/// `|x2| > 0.9 L2` at every stored time.
pub const DEFAULT_BOUNDARY_MASS_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub epsilon: f64,
    /// Viscosity of the fixed regime. Exactly one of `nu` and `alpha` is set.
    #[serde(default)]
    pub nu: Option<f64>,
    /// Combined regime `nu = eps^alpha`.
    #[serde(default)]
    pub alpha: Option<f64>,
    pub dt_max: f64,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// `null` removes the `eps` cap on the step.
    #[serde(default = "default_eps_dt_factor")]
    pub eps_dt_factor: Option<f64>,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default = "one")]
    pub sample_every: usize,
    #[serde(default)]
    pub integrator: IntegratorName,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// Samples between fields kept in memory for time averages.
    #[serde(default = "one")]
    pub snapshot_stride: usize,
    /// Sobolev index of the `Hs` column.
    #[serde(default = "default_s")]
    pub s: f64,
    /// Times at which SQGF snapshots are written.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_boundary_mass_limit")]
    pub boundary_mass_limit: f64,
    /// Observation strip `|x2| <= k_fraction L2` for sweep metrics.
    #[serde(default = "default_k_fraction")]
    pub k_fraction: f64,
    pub grid: GridConfig,
    #[serde(default)]
    pub data: DataConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorName {
    #[default]
    Ifrk2,
    Ifrk4,
}

impl From<IntegratorName> for Integrator {
    fn from(n: IntegratorName) -> Self {
        match n {
            IntegratorName::Ifrk2 => Integrator::Ifrk2,
            IntegratorName::Ifrk4 => Integrator::Ifrk4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n1: usize,
    pub n2: usize,
    #[serde(rename = "L1", default = "default_l1")]
    pub l1: f64,
    #[serde(rename = "L2", default = "default_l2")]
    pub l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default = "default_profile")]
    pub profile: String,
    #[serde(default = "default_amp")]
    pub amp: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_modes")]
    pub modes: u32,
    #[serde(default)]
    pub amp_exponent: Option<f64>,
}

impl Default for DataConfig {
    fn default() -> Self {
        let f = IllPreparedFamily::default();
        DataConfig {
            profile: f.profile.to_string(),
            amp: f.amp,
            seed: f.seed,
            scale: f.scale,
            width: f.width,
            modes: f.modes,
            amp_exponent: f.amp_exponent,
        }
    }
}

fn default_cfl() -> f64 {
    SolverConfig::new(1.0, 1.0).cfl
}
fn default_eps_dt_factor() -> Option<f64> {
    SolverConfig::new(1.0, 1.0).eps_dt_factor
}
fn default_s() -> f64 {
    SolverConfig::new(1.0, 1.0).hs_index
}
fn default_boundary_mass_limit() -> f64 {
    DEFAULT_BOUNDARY_MASS_LIMIT
}
fn default_k_fraction() -> f64 {
    DEFAULT_K_FRACTION
}
fn default_l1() -> f64 {
    DEFAULT_L1
}
fn default_l2() -> f64 {
    DEFAULT_L2
}
fn default_profile() -> String {
    DataConfig::default().profile
}
fn default_amp() -> f64 {
    IllPreparedFamily::default().amp
}
fn default_scale() -> f64 {
    IllPreparedFamily::default().scale
}
fn default_width() -> f64 {
    IllPreparedFamily::default().width
}
fn default_modes() -> u32 {
    IllPreparedFamily::default().modes
}
fn yes() -> bool {
    true
}
fn one() -> usize {
    1
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|e| match e {
            HarnessError::Core(c) => HarnessError::Config(c.to_string()),
            other => other,
        })
    }

    fn check(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(HarnessError::Config(format!(
                "unsupported config version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        self.regime()?;
        self.grid()?;
        self.family()?.validate()?;
        self.solver_config().validate()?;
        if self.boundary_mass_limit.is_nan() || self.boundary_mass_limit < 0.0 {
            return Err(HarnessError::Config("boundary_mass_limit must be >= 0".into()));
        }
        if !(self.k_fraction > 0.0 && self.k_fraction <= 1.0) {
            return Err(HarnessError::Config("k_fraction must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn regime(&self) -> Result<ScalingRegime> {
        self.regime_at(self.epsilon)
    }

    /// The configured regime with `epsilon` replaced.
    pub fn regime_at(&self, epsilon: f64) -> Result<ScalingRegime> {
        Ok(match (self.nu, self.alpha) {
            (Some(nu), None) => ScalingRegime::fixed(epsilon, nu)?,
            (None, Some(alpha)) => ScalingRegime::combined(epsilon, alpha)?,
            _ => return Err(HarnessError::Config("exactly one of \"nu\" and \"alpha\" must be given".into())),
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        let g = &self.grid;
        Ok(Grid::new(GridSpec::new(g.n1, g.n2, g.l1, g.l2)?)?)
    }

    pub fn family(&self) -> Result<IllPreparedFamily> {
        let d = &self.data;
        Ok(IllPreparedFamily {
            profile: d.profile.parse::<ZonalShape>()?,
            amp: d.amp,
            seed: d.seed,
            scale: d.scale,
            width: d.width,
            modes: d.modes,
            amp_exponent: d.amp_exponent,
        })
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dt_max: self.dt_max,
            t_end: self.t_end,
            cfl: self.cfl,
            eps_dt_factor: self.eps_dt_factor,
            dealias: self.dealias,
            sample_every: self.sample_every,
            integrator: self.integrator.into(),
            nonlinear: self.nonlinear,
            snapshot_stride: self.snapshot_stride,
            hs_index: self.s,
            stops: self.snapshot_times.clone(),
        }
    }

    /// SHA-256 of the canonical serialization; insensitive to formatting and
    /// key order of the source file.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
