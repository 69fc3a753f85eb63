use std::fmt::Write as _;

use crate::error::{Result, SqgError};
use crate::solver::Trajectory;

/// Per-sample energy balance `||theta(T)||^2 + 2 nu int_0^T ||Lambda^{1/2} theta||^2 - ||theta_0||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub defects: Vec<f64>,
    /// Allowed defect `10 dt^2 T ||theta_0||^2` with `dt` the largest step taken.
    pub tolerances: Vec<f64>,
    pub max_defect: f64,
    pub pass: bool,
}

impl EnergyLedger {
    pub const CSV_HEADER: &'static str = "t,defect";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for (t, d) in self.times.iter().zip(&self.defects) {
            let _ = writeln!(out, "{t:.12e},{d:.12e}");
        }
        out
    }
}

pub(crate) fn require_valid(traj: &Trajectory) -> Result<()> {
    if traj.samples.is_empty() {
        return Err(SqgError::InvalidTrajectory("no samples".into()));
    }
    if !traj.is_valid() {
        return Err(SqgError::InvalidTrajectory(format!("run ended early: {:?}", traj.status)));
    }
    Ok(())
}

/// Energy ledger with the time integral taken by the trapezoid rule over the samples.
pub fn energy_ledger(traj: &Trajectory, nu: f64) -> Result<EnergyLedger> {
    require_valid(traj)?;
    let s0 = &traj.samples[0];
    let e0 = s0.l2 * s0.l2;
    let dt = traj.dt_max;
    let mut integral = 0.0;
    let mut led = EnergyLedger {
        times: Vec::new(),
        defects: Vec::new(),
        tolerances: Vec::new(),
        max_defect: f64::NEG_INFINITY,
        pass: true,
    };
    for (i, s) in traj.samples.iter().enumerate() {
        if i > 0 {
            let p = &traj.samples[i - 1];
            integral += 0.5 * (p.h_half * p.h_half + s.h_half * s.h_half) * (s.t - p.t);
        }
        let d = s.l2 * s.l2 + 2.0 * nu * integral - e0;
        let tol = 10.0 * dt * dt * s.t * e0;
        led.pass &= d <= tol;
        led.max_defect = led.max_defect.max(d);
        led.times.push(s.t);
        led.defects.push(d);
        led.tolerances.push(tol);
    }
    Ok(led)
}
