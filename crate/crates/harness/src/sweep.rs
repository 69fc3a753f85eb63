//! Epsilon sweeps against the matching limit model.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sqg_core::diagnostics::{constraint_residual, convergence_metric, time_average, ConvergenceReport};
use sqg_core::limit::LimitModel;
use sqg_core::solver::Trajectory;

use crate::config::RunConfig;
use crate::error::{exit, HarnessError, Result};
use crate::output::{OutputDir, OutputFile};
use crate::run::{execute, RunOutcome};

/// Deviations at or below this count as zero when deciding monotonicity.
pub const D_FLOOR: f64 = 1e-10;
pub const CONVERGENCE_CSV: &str = "convergence.csv";
pub const CONSTRAINT_CSV: &str = "constraint.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeKind {
    Fixed,
    Combined,
}

impl std::str::FromStr for RegimeKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(RegimeKind::Fixed),
            "combined" => Ok(RegimeKind::Combined),
            _ => Err(HarnessError::Usage(format!("unknown regime {s:?} (expected fixed|combined)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub epsilons: Vec<f64>,
    pub regime: RegimeKind,
    /// Combined-regime exponent; falls back to the config's `alpha`, then 1.
    pub alpha: Option<f64>,
}

pub fn parse_epsilons(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| HarnessError::Usage(format!("bad epsilon {t:?}"))))
        .collect()
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.len() < 3 {
            return Err(HarnessError::Usage("need ≥ 3 epsilons".into()));
        }
        if !self.epsilons.windows(2).all(|w| w[1] < w[0]) {
            return Err(HarnessError::Usage("epsilons must be strictly decreasing".into()));
        }
        Ok(())
    }

    /// Member config for one `epsilon`.
    pub fn member(&self, base: &RunConfig, epsilon: f64) -> Result<RunConfig> {
        let mut c = base.clone();
        c.epsilon = epsilon;
        match self.regime {
            RegimeKind::Fixed => {
                if base.nu.is_none() {
                    return Err(HarnessError::Config("a fixed-viscosity sweep needs \"nu\" in the config".into()));
                }
                c.alpha = None;
            }
            RegimeKind::Combined => {
                c.alpha = Some(self.alpha.or(base.alpha).unwrap_or(1.0));
                c.nu = None;
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn model(&self, base: &RunConfig) -> LimitModel {
        match self.regime {
            RegimeKind::Fixed => LimitModel::FastRotation { nu: base.nu.unwrap_or(0.0) },
            RegimeKind::Combined => LimitModel::Frozen,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepVerdict {
    pub regime: RegimeKind,
    pub epsilons: Vec<f64>,
    pub deviations: Vec<f64>,
    pub d_floor: f64,
    pub strictly_decreasing: bool,
    pub all_below_floor: bool,
    /// `||R1 g|| / ||g||` of the time-averaged field of each member.
    pub constraint_residuals: Vec<f64>,
    pub constraint_decreasing: bool,
    pub members_valid: bool,
    pub verdict: String,
    pub outputs: Vec<OutputFile>,
}

impl SweepVerdict {
    pub fn pass(&self) -> bool {
        self.verdict == "PASS"
    }
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub members: Vec<RunOutcome>,
    pub report: Option<ConvergenceReport>,
    pub verdict: SweepVerdict,
}

impl SweepOutcome {
    pub fn exit_code(&self) -> i32 {
        if !self.verdict.members_valid {
            exit::REGULARITY
        } else if !self.verdict.pass() {
            exit::VERDICT_FAIL
        } else {
            exit::OK
        }
    }
}

fn member_dir(epsilon: f64) -> String {
    format!("eps_{epsilon}")
}

/// Runs every member concurrently, then compares the horizontal means with
/// the limit model and writes the report and verdict into `dir`.
pub fn execute_sweep(base: &RunConfig, spec: &SweepSpec, dir: &Path) -> Result<SweepOutcome> {
    spec.validate()?;
    base.validate()?;
    let configs = spec.epsilons.iter().map(|&e| spec.member(base, e)).collect::<Result<Vec<_>>>()?;
    let mut out = OutputDir::create(dir)?;
    let members = configs
        .par_iter()
        .map(|c| execute(c, &dir.join(member_dir(c.epsilon))))
        .collect::<Result<Vec<_>>>()?;

    let members_valid = members.iter().all(|m| m.manifest.is_valid());
    let report = if members_valid {
        let pairs: Vec<(f64, &Trajectory)> = members.iter().map(|m| (m.trajectory.regime.epsilon(), &m.trajectory)).collect();
        Some(convergence_metric(&pairs, spec.model(base), base.t_end, base.k_fraction)?)
    } else {
        None
    };
    let constraint_residuals = if members_valid {
        members
            .iter()
            .map(|m| Ok(constraint_residual(&time_average(&m.trajectory)?)))
            .collect::<Result<Vec<f64>>>()?
    } else {
        Vec::new()
    };

    if let Some(r) = &report {
        out.write(CONVERGENCE_CSV, "convergence", None, r.to_csv().as_bytes())?;
        let mut csv = String::from("epsilon,constraint_residual\n");
        for (e, c) in spec.epsilons.iter().zip(&constraint_residuals) {
            let _ = writeln!(csv, "{e},{c:e}");
        }
        out.write(CONSTRAINT_CSV, "constraint", None, csv.as_bytes())?;
    }
    let strictly_decreasing = report.as_ref().is_some_and(|r| r.strictly_decreasing());
    let all_below_floor = report.as_ref().is_some_and(|r| r.all_below(D_FLOOR));
    let pass = members_valid && (strictly_decreasing || all_below_floor);
    let verdict = out.finalize(|outputs| SweepVerdict {
        regime: spec.regime,
        epsilons: spec.epsilons.clone(),
        deviations: report.as_ref().map(|r| r.deviations.clone()).unwrap_or_default(),
        d_floor: D_FLOOR,
        strictly_decreasing,
        all_below_floor,
        constraint_decreasing: constraint_residuals.windows(2).all(|w| w[1] < w[0]) && !constraint_residuals.is_empty(),
        constraint_residuals,
        members_valid,
        verdict: if pass { "PASS" } else { "FAIL" }.into(),
        outputs,
    })?;
    Ok(SweepOutcome { members, report, verdict })
}
