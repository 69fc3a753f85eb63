//! One trajectory from a config: integrate, check, persist.

use std::fmt::Write as _;
use std::path::Path;

use sqg_core::diagnostics::{energy_ledger, EnergyLedger};
use sqg_core::snapshot::Snapshot;
use sqg_core::solver::{integrate, make_ill_prepared_data, RunStatus, ScalingRegime, Trajectory, DECAY_FRACTION};
use sqg_core::spectral::inverse_transform;

use crate::config::RunConfig;
use crate::error::{exit, Result};
use crate::output::{
    DataDescriptor, ExperimentManifest, LedgerSummary, OutputDir, RegimeDescriptor, RunSummary, Validity,
    MANIFEST_VERSION,
};

pub const TIMESERIES: &str = "timeseries.csv";
pub const TIMESERIES_HEADER: &str = "t,L2,H_half_seminorm,Hs,energy_defect";
pub const LEDGER: &str = "energy_ledger.csv";

#[derive(Debug)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub ledger: Option<EnergyLedger>,
    pub manifest: ExperimentManifest,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.manifest.is_valid() {
            exit::OK
        } else {
            exit::REGULARITY
        }
    }
}

pub fn regime_descriptor(r: &ScalingRegime) -> RegimeDescriptor {
    match *r {
        ScalingRegime::FixedViscosity { epsilon, nu } => {
            RegimeDescriptor { kind: "fixed".into(), epsilon, nu, alpha: None }
        }
        ScalingRegime::Combined { epsilon, alpha } => {
            RegimeDescriptor { kind: "combined".into(), epsilon, nu: r.nu(), alpha: Some(alpha) }
        }
    }
}

pub fn timeseries_csv(traj: &Trajectory) -> String {
    let mut out = format!("{TIMESERIES_HEADER}\n");
    for s in &traj.samples {
        let _ = writeln!(out, "{:e},{:e},{:e},{:e},{:e}", s.t, s.l2, s.h_half, s.hs, s.energy_defect);
    }
    out
}

/// Integrates `cfg` and writes its outputs into `dir`.
pub fn execute(cfg: &RunConfig, dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let regime = cfg.regime()?;
    let family = cfg.family()?;
    let theta0 = make_ill_prepared_data(&family, cfg.epsilon, &grid)?;
    let traj = integrate(&theta0, &regime, &cfg.solver_config())?;

    let mut out = OutputDir::create(dir)?;
    out.write(TIMESERIES, "timeseries", None, timeseries_csv(&traj).as_bytes())?;

    let ledger = if traj.is_valid() { Some(energy_ledger(&traj, regime.nu())?) } else { None };
    if let Some(l) = &ledger {
        out.write(LEDGER, "energy_ledger", None, l.to_csv().as_bytes())?;
    }

    let tol = 1e-12 * cfg.t_end.max(1.0);
    let stored = traj.snapshot_times();
    let mut wanted: Vec<f64> = cfg.snapshot_times.clone();
    wanted.sort_by(f64::total_cmp);
    wanted.dedup();
    for (n, t) in wanted.iter().enumerate() {
        if let Some(i) = stored.iter().position(|s| (s - t).abs() <= tol) {
            let snap = Snapshot::from_field(&inverse_transform(&traj.snapshots[i]));
            out.write(&format!("snapshot_{n:03}.sqgf"), "snapshot", Some(stored[i]), &snap.encode())?;
        }
    }

    let boundary = traj
        .snapshots
        .iter()
        .map(|f| inverse_transform(f).boundary_mass_fraction(DECAY_FRACTION))
        .fold(0.0, f64::max);
    let status = match traj.status {
        RunStatus::Complete => "complete".to_string(),
        RunStatus::RegularityLost { t } => format!("regularity lost at t = {t}"),
        RunStatus::DtUnderflow { t, dt } => format!("step underflow at t = {t} (dt = {dt:e})"),
    };
    let manifest = out.finalize(|outputs| ExperimentManifest {
        manifest_version: MANIFEST_VERSION,
        config_hash: cfg.hash(),
        created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        solver_version: sqg_core::VERSION.to_string(),
        regime: regime_descriptor(&regime),
        grid: cfg.grid.clone(),
        data: DataDescriptor {
            family: "ill_prepared".into(),
            params: cfg.data.clone(),
            amp_effective: family.amp_at(cfg.epsilon),
        },
        run: RunSummary {
            status,
            steps: traj.steps,
            final_time: traj.final_time(),
            dt_min: traj.dt_min,
            dt_max: traj.dt_max,
        },
        validity: Validity {
            regularity: traj.is_valid(),
            boundary_mass: boundary <= cfg.boundary_mass_limit,
            boundary_mass_fraction: boundary,
            boundary_mass_limit: cfg.boundary_mass_limit,
        },
        energy_ledger: ledger.as_ref().map(|l| LedgerSummary { max_defect: l.max_defect, pass: l.pass }),
        outputs,
    })?;
    Ok(RunOutcome { trajectory: traj, ledger, manifest })
}
