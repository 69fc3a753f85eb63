//! Weak-formulation residual against test functions `psi(t, x) = tau(t) phi(x)`.

use super::energy::require_valid;
use crate::error::{Result, SqgError};
use crate::limit::{embed_zonal, ZonalProfile};
use crate::solver::{transport_term, ScalingRegime, Trajectory};
use crate::spectral::{derivative, forward_transform, fractional_laplacian, inverse_transform, riesz, Axis, PhysicalField, SpectralField};

/// Outer fraction of the vertical strip where the spatial factor must vanish.
pub const TEST_SUPPORT_MARGIN: f64 = 0.2;

/// Smooth temporal factor with `tau(T) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temporal {
    /// `cos^2(pi t / (2T))`.
    CosSquared { horizon: f64 },
    /// `(1 - t/T)^power`, `power >= 2`.
    Polynomial { horizon: f64, power: i32 },
}

impl Temporal {
    pub fn horizon(&self) -> f64 {
        match *self {
            Temporal::CosSquared { horizon } | Temporal::Polynomial { horizon, .. } => horizon,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Temporal::CosSquared { horizon } => (std::f64::consts::FRAC_PI_2 * t / horizon).cos().powi(2),
            Temporal::Polynomial { horizon, power } => (1.0 - t / horizon).powi(power),
        }
    }

    /// Analytic `d tau / dt`.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Temporal::CosSquared { horizon } => {
                -std::f64::consts::PI / (2.0 * horizon) * (std::f64::consts::PI * t / horizon).sin()
            }
            Temporal::Polynomial { horizon, power } => -(power as f64) / horizon * (1.0 - t / horizon).powi(power - 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TestFunction {
    spatial: SpectralField,
    temporal: Temporal,
    zonal: bool,
}

fn check_support(f: &PhysicalField) -> Result<()> {
    let g = f.grid();
    let cut = (1.0 - TEST_SUPPORT_MARGIN) * g.l2();
    for (k, row) in f.values().chunks(g.n1()).enumerate() {
        if g.x2(k).abs() >= cut && row.iter().any(|v| *v != 0.0) {
            return Err(SqgError::InvalidArgument(format!("test function not supported in |x2| < {cut}")));
        }
    }
    Ok(())
}

fn check_temporal(t: &Temporal) -> Result<()> {
    let ok = match *t {
        Temporal::CosSquared { horizon } => horizon > 0.0,
        Temporal::Polynomial { horizon, power } => horizon > 0.0 && power >= 2,
    };
    if ok && t.horizon().is_finite() {
        Ok(())
    } else {
        Err(SqgError::InvalidArgument(format!("invalid temporal profile {t:?}")))
    }
}

/// `exp(1 - 1/(1 - s^2))` for `|s| < 1`, zero outside.
fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

impl TestFunction {
    /// Zonal test function `tau(t) phi(x2)` with `phi` a smooth bump of half-width
    /// `radius` centred at `center`. Its support must stay inside the inner 80%.
    pub fn zonal_bump(grid: &crate::spectral::Grid, center: f64, radius: f64, temporal: Temporal) -> Result<Self> {
        check_temporal(&temporal)?;
        let p = ZonalProfile::from_fn(grid, |x2| bump((x2 - center) / radius));
        let values: Vec<f64> = (0..grid.len()).map(|i| bump((grid.x2(i / grid.n1()) - center) / radius)).collect();
        check_support(&PhysicalField::new(grid.clone(), values)?)?;
        Ok(TestFunction { spatial: embed_zonal(&p), temporal, zonal: true })
    }

    /// General `phi(x1, x2)`; the `d_1 phi = 0` constraint is not imposed.
    pub fn generic(spatial: &PhysicalField, temporal: Temporal) -> Result<Self> {
        check_temporal(&temporal)?;
        check_support(spatial)?;
        let s = forward_transform(spatial)?;
        let zonal = derivative(&s, Axis::X1).l2_norm() <= 1e-13 * s.l2_norm().max(f64::MIN_POSITIVE);
        Ok(TestFunction { spatial: s, temporal, zonal })
    }

    pub fn spatial(&self) -> &SpectralField {
        &self.spatial
    }
    pub fn temporal(&self) -> Temporal {
        self.temporal
    }
    /// Whether `||d_1 phi|| <= 1e-13 ||phi||`.
    pub fn is_zonal(&self) -> bool {
        self.zonal
    }
    /// Relative `||d_1 phi|| / ||phi||`.
    pub fn d1_residual(&self) -> f64 {
        let n = self.spatial.l2_norm();
        if n == 0.0 {
            0.0
        } else {
            derivative(&self.spatial, Axis::X1).l2_norm() / n
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakFormReport {
    pub residual: f64,
    /// Sum of the magnitudes of the individual integrated terms.
    pub scale: f64,
    pub relative: f64,
    /// `int int (1/eps) R1 theta psi`, zero for zonal test functions.
    pub riesz_term: f64,
    pub samples: usize,
}

/// `-int int (theta psi_t + theta u.grad psi - nu Lambda^{1/2} theta Lambda^{1/2} psi -
/// (1/eps) R1 theta psi) - int theta_0 psi(0)`, trapezoid in time over the
/// stored snapshots up to the test function's horizon.
///
/// The transport pairing uses the solver's own (dealiased) `div(theta u)`.
pub fn weak_form_residual(traj: &Trajectory, psi: &TestFunction, regime: &ScalingRegime) -> Result<WeakFormReport> {
    weak_form_residual_with(traj, psi, regime, true)
}

pub fn weak_form_residual_with(
    traj: &Trajectory,
    psi: &TestFunction,
    regime: &ScalingRegime,
    include_riesz: bool,
) -> Result<WeakFormReport> {
    require_valid(traj)?;
    traj.grid.ensure_same(psi.spatial.grid())?;
    let horizon = psi.temporal.horizon();
    let times = traj.snapshot_times();
    let end = times
        .iter()
        .position(|&t| (t - horizon).abs() <= 1e-12 * horizon.max(1.0))
        .ok_or_else(|| SqgError::InvalidTrajectory(format!("no snapshot at the test horizon {horizon}")))?;
    if end < 1 {
        return Err(SqgError::InvalidTrajectory("need at least two snapshots before the horizon".into()));
    }
    let phi = &psi.spatial;
    let lam_phi = fractional_laplacian(phi, 1.0)?;
    let (nu, amp) = (regime.nu(), regime.amplitude());
    // integrands per snapshot: [theta psi_t, theta u.grad psi, -nu Lambda^1/2 . Lambda^1/2, -(1/eps) R1 theta psi]
    let mut terms: Vec<[f64; 4]> = Vec::with_capacity(end + 1);
    for (f, &t) in traj.snapshots.iter().zip(&times).take(end + 1) {
        let (tau, dtau) = (psi.temporal.value(t), psi.temporal.derivative(t));
        let (n, _) = transport_term(f, traj.config.dealias).map_err(|_| SqgError::InvalidTrajectory("non-finite snapshot".into()))?;
        terms.push([
            dtau * f.inner(phi)?,
            -tau * n.inner(phi)?,
            -nu * tau * f.inner(&lam_phi)?,
            -amp * tau * riesz(f, Axis::X1).inner(phi)?,
        ]);
    }
    let mut integrals = [0.0; 4];
    for i in 1..=end {
        let h = times[i] - times[i - 1];
        for (acc, (a, b)) in integrals.iter_mut().zip(terms[i - 1].iter().zip(&terms[i])) {
            *acc += 0.5 * h * (a + b);
        }
    }
    let riesz_term = -integrals[3];
    if !include_riesz {
        integrals[3] = 0.0;
    }
    let initial = psi.temporal.value(0.0) * traj.snapshots[0].inner(phi)?;
    let residual = -integrals.iter().sum::<f64>() - initial;
    let scale = integrals.iter().map(|v| v.abs()).sum::<f64>() + initial.abs();
    if psi.zonal && riesz_term.abs() > 1e-13 * scale {
        return Err(SqgError::InvalidArgument(format!("Riesz pairing {riesz_term:e} nonzero for a zonal test function")));
    }
    Ok(WeakFormReport {
        residual,
        scale,
        relative: if scale > 0.0 { residual.abs() / scale } else { 0.0 },
        riesz_term,
        samples: end + 1,
    })
}

/// Physical values of `phi`, mainly for reports.
pub fn test_function_values(psi: &TestFunction) -> PhysicalField {
    inverse_transform(&psi.spatial)
}
