use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;
use crate::limit::LimitModel;
use crate::random::{random_spectral, SpectrumShape};
use crate::solver::{integrate, make_ill_prepared_data, IllPreparedFamily, Integrator, ScalingRegime, SolverConfig, Trajectory};
use crate::spectral::{forward_transform, horizontal_mean, Grid, GridSpec, PhysicalField, SpectralField};

fn unit_grid(n1: usize, n2: usize) -> Grid {
    Grid::new(GridSpec::new(n1, n2, 2.0 * PI, PI).unwrap()).unwrap()
}

fn zonal_run(dt: f64, t_end: f64, nu: f64) -> (Trajectory, ScalingRegime) {
    let g = unit_grid(8, 32);
    let theta0 = SpectralField::single_mode(&g, 0, 1, Complex64::new(0.1, 0.0))
        .unwrap()
        .add(&SpectralField::single_mode(&g, 0, 2, Complex64::new(0.0, 0.05)).unwrap())
        .unwrap();
    let regime = ScalingRegime::fixed(0.3, nu).unwrap();
    (integrate(&theta0, &regime, &SolverConfig::linear(dt, t_end)).unwrap(), regime)
}

/// Fixed-step nonlinear run (CFL and eps caps disabled).
fn nonlinear_run(dt: f64, t_end: f64, sample_every: usize, integrator: Integrator) -> (Trajectory, ScalingRegime) {
    let g = unit_grid(32, 32);
    let theta0 = random_spectral(&g, 31, SpectrumShape::Decay(3.0)).scale(0.5);
    let regime = ScalingRegime::fixed(0.5, 0.5).unwrap();
    let cfg = SolverConfig { cfl: 1e6, eps_dt_factor: None, sample_every, integrator, ..SolverConfig::new(dt, t_end) };
    (integrate(&theta0, &regime, &cfg).unwrap(), regime)
}

#[test]
fn ledger_of_zero_run_is_zero() {
    let g = unit_grid(8, 8);
    let tr = integrate(&SpectralField::zeros(&g), &ScalingRegime::fixed(0.5, 1.0).unwrap(), &SolverConfig::new(0.1, 1.0))
        .unwrap();
    let led = energy_ledger(&tr, 1.0).unwrap();
    assert!(led.defects.iter().all(|d| *d == 0.0));
    assert!(led.pass);
    assert!(led.to_csv().starts_with("t,defect\n"));
}

#[test]
fn ledger_balances_on_zonal_linear_run() {
    let (tr, r) = zonal_run(2.5e-4, 1.0, 0.5);
    let led = energy_ledger(&tr, r.nu()).unwrap();
    assert!(led.defects.iter().all(|d| d.abs() <= 1e-8), "{}", led.max_defect);
}

#[test]
fn ledger_defect_is_second_order() {
    let max_abs = |dt: f64| {
        let (tr, r) = nonlinear_run(dt, 0.5, 1, Integrator::Ifrk2);
        let led = energy_ledger(&tr, r.nu()).unwrap();
        assert!(led.pass);
        led.defects.iter().fold(0.0f64, |m, d| m.max(d.abs()))
    };
    let (a, b) = (max_abs(0.02), max_abs(0.01));
    assert!(a / b >= 3.0, "{a} {b}");
}

#[test]
fn ledger_rejects_partial_runs() {
    let (mut tr, _) = zonal_run(0.1, 0.5, 0.5);
    tr.status = crate::solver::RunStatus::RegularityLost { t: 0.2 };
    assert!(matches!(energy_ledger(&tr, 0.5), Err(crate::SqgError::InvalidTrajectory(_))));
}

#[test]
fn riesz_term_is_orthogonal() {
    let g = unit_grid(32, 64);
    for seed in 0..20 {
        let th = random_spectral(&g, seed, SpectrumShape::Decay(1.0));
        for s in [0.0, 0.5, 1.0] {
            let scale = crate::spectral::fractional_laplacian(&th, s).unwrap().l2_norm().powi(2);
            assert!(riesz_orthogonality(&th, s).unwrap().abs() <= 1e-13 * scale);
        }
    }
    let zonal = horizontal_mean(&random_spectral(&g, 3, SpectrumShape::White));
    assert_eq!(riesz_orthogonality(&zonal, 0.5).unwrap(), 0.0);
}

#[test]
fn constraint_residual_examples() {
    let g = unit_grid(16, 16);
    let f = random_spectral(&g, 9, SpectrumShape::White);
    assert_eq!(constraint_residual(&horizontal_mean(&f)), 0.0);
    let cos = forward_transform(&PhysicalField::from_fn(&g, |x1, _| x1.cos())).unwrap();
    assert!((constraint_residual(&cos) - 1.0).abs() < 1e-14);
    assert_eq!(constraint_residual(&SpectralField::zeros(&g)), 0.0);
}

#[test]
fn mean_residual_on_zonal_run() {
    let (tr, r) = zonal_run(1e-3, 0.5, 0.5);
    let m = mean_equation_residual(&tr, r.nu()).unwrap();
    assert!(m.max_residual <= 1e-6, "{}", m.max_residual);
    assert_eq!(m.riesz_mean_max, 0.0);
}

#[test]
fn mean_residual_converges_with_sampling() {
    let res = |every| {
        let (tr, r) = nonlinear_run(2.5e-3, 0.3, every, Integrator::Ifrk4);
        let m = mean_equation_residual(&tr, r.nu()).unwrap();
        assert_eq!(m.riesz_mean_max, 0.0);
        m.max_residual
    };
    let (a, b) = (res(8), res(4));
    assert!(a / b >= 3.0, "{a} {b}");
}

#[test]
fn time_average_of_constant_run() {
    let g = unit_grid(8, 8);
    let c = SpectralField::single_mode(&g, 0, 0, Complex64::new(2.0, 0.0)).unwrap();
    let tr = integrate(&c, &ScalingRegime::fixed(0.5, 0.5).unwrap(), &SolverConfig::new(0.1, 1.0)).unwrap();
    assert!(time_average(&tr).unwrap().rel_distance(&c).unwrap() < 1e-14);
}

fn bump_psi(g: &Grid, horizon: f64) -> TestFunction {
    TestFunction::zonal_bump(g, 0.2, 0.6 * g.l2(), Temporal::CosSquared { horizon }).unwrap()
}

#[test]
fn test_function_constraints() {
    let g = unit_grid(16, 64);
    let psi = bump_psi(&g, 1.0);
    assert!(psi.is_zonal());
    assert_eq!(psi.d1_residual(), 0.0);
    assert!(TestFunction::zonal_bump(&g, 0.0, 0.9 * g.l2(), Temporal::CosSquared { horizon: 1.0 }).is_err());
    let t = Temporal::Polynomial { horizon: 2.0, power: 3 };
    assert_eq!(t.value(2.0), 0.0);
    let h = 1e-6;
    assert!(((t.value(0.7 + h) - t.value(0.7 - h)) / (2.0 * h) - t.derivative(0.7)).abs() < 1e-8);
    let c = Temporal::CosSquared { horizon: 1.5 };
    assert!(c.value(1.5).abs() < 1e-30);
    assert!(((c.value(0.4 + h) - c.value(0.4 - h)) / (2.0 * h) - c.derivative(0.4)).abs() < 1e-8);
}

#[test]
fn weak_form_zero_and_zonal_runs() {
    let g = unit_grid(8, 8);
    let tr = integrate(&SpectralField::zeros(&g), &ScalingRegime::fixed(0.5, 0.5).unwrap(), &SolverConfig::new(0.1, 1.0))
        .unwrap();
    let rep = weak_form_residual(&tr, &bump_psi(&g, 1.0), &tr.regime).unwrap();
    assert_eq!(rep.residual, 0.0);

    let (tr, r) = zonal_run(1e-3, 1.0, 0.5);
    let rep = weak_form_residual(&tr, &bump_psi(&tr.grid, 1.0), &r).unwrap();
    assert!(rep.relative <= 1e-6, "{rep:?}");
    assert_eq!(rep.riesz_term, 0.0);
}

#[test]
fn weak_form_riesz_pairing() {
    let (tr, r) = nonlinear_run(5e-3, 0.4, 1, Integrator::Ifrk2);
    let psi = bump_psi(&tr.grid, 0.4);
    let with = weak_form_residual_with(&tr, &psi, &r, true).unwrap();
    let without = weak_form_residual_with(&tr, &psi, &r, false).unwrap();
    assert!((with.residual - without.residual).abs() <= 1e-13 * with.scale);
    // a test function with x1 dependence sees the Riesz term
    let g = tr.grid.clone();
    let phi = PhysicalField::from_fn(&g, |x1, x2| if x2.abs() < 2.0 { x1.sin() * (-1.0 / (4.0 - x2 * x2)).exp() } else { 0.0 });
    let generic = TestFunction::generic(&phi, Temporal::CosSquared { horizon: 0.4 }).unwrap();
    assert!(!generic.is_zonal());
    let rep = weak_form_residual(&tr, &generic, &r).unwrap();
    assert!(rep.riesz_term.abs() > 1e-6 * rep.scale);
    assert!(rep.relative < 1e-3, "{rep:?}");
}

#[test]
fn weak_form_converges_with_sampling() {
    let res = |every| {
        let (tr, r) = nonlinear_run(2.5e-3, 0.4, every, Integrator::Ifrk4);
        weak_form_residual(&tr, &bump_psi(&tr.grid, 0.4), &r).unwrap().residual.abs()
    };
    let (a, b) = (res(8), res(4));
    assert!(a / b >= 3.0, "{a} {b}");
}

#[test]
fn hs_growth_cases() {
    let g = unit_grid(8, 8);
    let tr = integrate(&SpectralField::zeros(&g), &ScalingRegime::fixed(0.5, 0.5).unwrap(), &SolverConfig::new(0.1, 1.0))
        .unwrap();
    let h = hs_growth(&tr, 2.5).unwrap();
    assert!(h.unbounded);
    assert_eq!(h.t_star, 1.0);

    let (tr, _) = zonal_run(1e-2, 1.0, 0.5);
    let h = hs_growth(&tr, 2.5).unwrap();
    assert!(h.norms.windows(2).all(|w| w[1] <= w[0]));
    assert_eq!(h.required_c, 0.0);
    assert!(h.holds_with(0.0));
}

#[test]
fn t_star_scales_inversely_with_data_size() {
    let g = Grid::new(GridSpec::with_sizes(32, 64).unwrap()).unwrap();
    let base = make_ill_prepared_data(&IllPreparedFamily::default(), 0.5, &g).unwrap();
    let regime = ScalingRegime::fixed(0.5, 0.5).unwrap();
    let reports: Vec<HsGrowth> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&a| {
            let tr = integrate(&base.scale(a), &regime, &SolverConfig::new(2e-3, 0.2)).unwrap();
            hs_growth(&tr, 2.5).unwrap()
        })
        .collect();
    let ladder = t_star_ladder(&reports).unwrap();
    assert!(ladder.max_deviation <= 0.3, "{ladder:?}");
}

#[test]
fn well_prepared_sweep_has_no_deviation() {
    let (a, _) = zonal_run(1e-2, 1.0, 0.5);
    let g = a.grid.clone();
    let theta0 = a.initial().clone();
    let runs: Vec<(f64, Trajectory)> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&e| (e, integrate(&theta0, &ScalingRegime::fixed(e, 0.5).unwrap(), &SolverConfig::new(1e-2, 1.0)).unwrap()))
        .collect();
    let refs: Vec<(f64, &Trajectory)> = runs.iter().map(|(e, t)| (*e, t)).collect();
    let rep = convergence_metric(&refs, LimitModel::FastRotation { nu: 0.5 }, 1.0, DEFAULT_K_FRACTION).unwrap();
    assert!(rep.all_below(1e-6), "{rep:?}");
    assert_eq!(rep.epsilons, vec![0.2, 0.1, 0.05]);
    assert!(rep.to_csv().lines().nth(1).unwrap().ends_with(",L2([0,T]xK),1,0.5"));
    assert!(convergence_metric(&refs, LimitModel::Frozen, 2.0, 0.5).is_err());
    assert_eq!(g, runs[0].1.grid);
}

#[test]
fn deviation_is_insensitive_to_dt_halving() {
    let g = Grid::new(GridSpec::with_sizes(32, 64).unwrap()).unwrap();
    let theta0 = make_ill_prepared_data(&IllPreparedFamily::default(), 0.05, &g).unwrap();
    let regime = ScalingRegime::fixed(0.05, 0.5).unwrap();
    let d: Vec<f64> = [0.01, 0.005]
        .iter()
        .map(|&dt| {
            let tr = integrate(&theta0, &regime, &SolverConfig::new(dt, 1.0)).unwrap();
            mean_deviation(&tr, LimitModel::FastRotation { nu: 0.5 }, 1.0, DEFAULT_K_FRACTION).unwrap()
        })
        .collect();
    assert!(d[0] > 0.0);
    assert!((d[0] - d[1]).abs() <= 0.01 * d[1], "{d:?}");
}
