use num_complex::Complex64;

use super::config::{ScalingRegime, SolverConfig, DT_FLOOR};
use super::rhs::Stepper;
use crate::error::{Result, SqgError};
use crate::spectral::{Grid, SpectralField};

/// Scalar diagnostics and zonal columns recorded at one sample time.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Size of the step that reached `t` (0 at the start).
    pub dt: f64,
    pub l2: f64,
    /// `||Lambda^{1/2} theta||_{L^2}`.
    pub h_half: f64,
    /// `||theta||_{H^s}` with `s = config.hs_index`.
    pub hs: f64,
    /// `||theta(t)||^2 + 2 nu int_0^t ||Lambda^{1/2} theta||^2 - ||theta_0||^2`,
    /// time integral by trapezoid over the samples so far.
    pub energy_defect: f64,
    /// `xi1 = 0` coefficients of `theta`, i.e. the horizontal mean, indexed by `kk`.
    pub mean: Vec<Complex64>,
    /// `xi1 = 0` coefficients of `div(theta u)`.
    pub mean_transport: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Complete,
    RegularityLost { t: f64 },
    DtUnderflow { t: f64, dt: f64 },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: Grid,
    pub regime: ScalingRegime,
    pub config: SolverConfig,
    pub samples: Vec<Sample>,
    /// Stored fields; `snapshots[i]` belongs to `samples[snapshot_samples[i]]`.
    pub snapshots: Vec<SpectralField>,
    pub snapshot_samples: Vec<usize>,
    pub status: RunStatus,
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshot_samples.iter().map(|&i| self.samples[i].t).collect()
    }

    pub fn is_valid(&self) -> bool {
        self.status == RunStatus::Complete
    }

    /// The run's failure, if any, as an error.
    pub fn check(&self) -> Result<()> {
        match self.status {
            RunStatus::Complete => Ok(()),
            RunStatus::RegularityLost { t } => Err(SqgError::RegularityLoss { t }),
            RunStatus::DtUnderflow { t, dt } => Err(SqgError::DtUnderflow { t, dt }),
        }
    }

    pub fn initial(&self) -> &SpectralField {
        &self.snapshots[0]
    }

    pub fn last_snapshot(&self) -> &SpectralField {
        self.snapshots.last().expect("trajectory always holds the initial field")
    }

    /// True when every sample carries a stored field.
    pub fn is_dense(&self) -> bool {
        self.snapshot_samples.len() == self.samples.len()
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

fn zonal_column(f: &SpectralField) -> Vec<Complex64> {
    let n1 = f.grid().n1();
    f.coeffs().iter().step_by(n1).copied().collect()
}

struct Recorder {
    nu: f64,
    hs_index: f64,
    e0: f64,
    dissipation: f64,
}

impl Recorder {
    fn sample(&mut self, theta: &SpectralField, k1: &SpectralField, t: f64, dt: f64, prev: Option<&Sample>) -> Sample {
        let l2 = theta.l2_norm();
        let h_half = theta.homogeneous_norm(0.5);
        if let Some(p) = prev {
            self.dissipation += 0.5 * (p.h_half * p.h_half + h_half * h_half) * (t - p.t);
        } else {
            self.e0 = l2 * l2;
        }
        Sample {
            t,
            dt,
            l2,
            h_half,
            hs: theta.sobolev_norm(self.hs_index),
            energy_defect: l2 * l2 + 2.0 * self.nu * self.dissipation - self.e0,
            mean: zonal_column(theta),
            mean_transport: zonal_column(k1).into_iter().map(|c| -c).collect(),
        }
    }
}

/// Integrates from `theta0` to `config.t_end`.
///
/// Only invalid inputs are errors. A regularity loss or a step-size underflow
/// ends the run early; the partial trajectory is returned with its status set.
pub fn integrate(theta0: &SpectralField, regime: &ScalingRegime, config: &SolverConfig) -> Result<Trajectory> {
    regime.validate()?;
    config.validate()?;
    if !theta0.is_finite() {
        return Err(SqgError::InvalidArgument("initial data is not finite".into()));
    }
    let grid = theta0.grid().clone();
    let stepper = Stepper::new(&grid, regime, config);
    let mut rec = Recorder { nu: regime.nu(), hs_index: config.hs_index, e0: 0.0, dissipation: 0.0 };
    let mut traj = Trajectory {
        grid: grid.clone(),
        regime: *regime,
        config: config.clone(),
        samples: Vec::new(),
        snapshots: Vec::new(),
        snapshot_samples: Vec::new(),
        status: RunStatus::Complete,
        steps: 0,
        dt_min: f64::INFINITY,
        dt_max: 0.0,
    };
    let (mut k1, mut umax) = match stepper.rhs(theta0) {
        Ok(v) => v,
        Err(_) => {
            return Err(SqgError::InvalidArgument("initial data is not finite".into()));
        }
    };
    let mut theta = theta0.clone();
    traj.samples.push(rec.sample(&theta, &k1, 0.0, 0.0, None));
    traj.snapshots.push(theta.clone());
    traj.snapshot_samples.push(0);

    let t_end = config.t_end;
    let done_tol = 1e-12 * t_end.max(1.0);
    let dx = grid.dx_min();
    let mut stops: Vec<f64> = config.stops.iter().copied().filter(|&s| s > done_tol && t_end - s > done_tol).collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let mut stops = stops.into_iter().peekable();
    let mut t = 0.0;
    while t_end - t > done_tol {
        let target = stops.peek().copied().unwrap_or(t_end);
        let remaining = target - t;
        let mut dt = config.dt_max;
        if config.nonlinear && umax > 0.0 {
            dt = dt.min(config.cfl * dx / umax);
        }
        if let Some(f) = config.eps_dt_factor {
            dt = dt.min(f * regime.epsilon());
        }
        let last = dt >= remaining;
        if last {
            dt = remaining;
        } else if dt < DT_FLOOR {
            traj.status = RunStatus::DtUnderflow { t, dt };
            break;
        }
        let next = stepper.advance(&theta, &k1, dt).and_then(|th| stepper.rhs(&th).map(|r| (th, r)));
        let (th, (nk1, nu_max)) = match next {
            Ok(v) => v,
            Err(_) => {
                traj.status = RunStatus::RegularityLost { t };
                break;
            }
        };
        theta = th;
        k1 = nk1;
        umax = nu_max;
        let at_stop = last || target - (t + dt) <= done_tol;
        t = if at_stop { target } else { t + dt };
        if at_stop && target < t_end {
            stops.next();
        }
        traj.steps += 1;
        traj.dt_min = traj.dt_min.min(dt);
        traj.dt_max = traj.dt_max.max(dt);
        let finished = t_end - t <= done_tol;
        let forced = finished || at_stop;
        if traj.steps.is_multiple_of(config.sample_every) || forced {
            let s = rec.sample(&theta, &k1, t, dt, traj.samples.last());
            traj.samples.push(s);
            let idx = traj.samples.len() - 1;
            if idx.is_multiple_of(config.snapshot_stride) || forced {
                traj.snapshots.push(theta.clone());
                traj.snapshot_samples.push(idx);
            }
        }
    }
    if traj.steps == 0 {
        traj.dt_min = 0.0;
    }
    Ok(traj)
}
