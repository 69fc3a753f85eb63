use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;
use crate::random::{random_spectral, SpectrumShape};
use crate::spectral::{dealias, riesz, Axis, Grid, GridSpec, SpectralField};

fn unit_grid(n1: usize, n2: usize) -> Grid {
    // xi1 = j and xi2 = k
    Grid::new(GridSpec::new(n1, n2, 2.0 * PI, PI).unwrap()).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn linear_symbol_examples() {
    let g = unit_grid(8, 8);
    let lam = linear_symbol(&g, &ScalingRegime::fixed(1.0, 1.0).unwrap());
    let at = |j, k| lam[g.mode_index(j, k).unwrap()];
    assert!((at(1, 0) - c(1.0, 1.0)).norm() < 1e-15);
    assert_eq!(at(0, 0), c(0.0, 0.0));
    for k in [-3, 1, 2] {
        assert_eq!(at(0, k), c((k as f64).abs(), 0.0));
    }
    let lam = linear_symbol(&g, &ScalingRegime::combined(0.1, 1.0).unwrap());
    assert!((lam[g.mode_index(1, 0).unwrap()] - c(0.1, 10.0)).norm() < 1e-13);
    for l in &lam {
        assert!(l.re >= 0.0 && l.im.abs() <= 10.0 + 1e-12);
    }
}

#[test]
fn transport_vanishes_on_constants_and_zonal_states() {
    let g = unit_grid(16, 32);
    let k = SpectralField::single_mode(&g, 0, 0, c(3.0, 0.0)).unwrap();
    assert_eq!(nonlinear_term(&k).unwrap().max_coeff_abs(), 0.0);
    let zonal = crate::spectral::horizontal_mean(&random_spectral(&g, 4, SpectrumShape::Decay(1.0)));
    assert!(nonlinear_term(&zonal).unwrap().max_coeff_abs() <= 1e-12 * zonal.max_coeff_abs());
}

#[test]
fn transport_matches_convolution_oracle() {
    let g = unit_grid(8, 8);
    let theta = random_spectral(&g, 99, SpectrumShape::White);
    let th = dealias(&theta);
    let n = nonlinear_term(&theta).unwrap();
    let kept: Vec<(i64, i64)> = (-4i64..4)
        .flat_map(|j| (-4i64..4).map(move |k| (j, k)))
        .filter(|&(j, k)| 3 * j.abs() < 8 && 3 * k.abs() < 8)
        .collect();
    let coef = |j: i64, k: i64| th.mode(j, k);
    let mut scale: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for &(x1, x2) in &(-4..4).flat_map(|j| (-4..4).map(move |k| (j, k))).collect::<Vec<_>>() {
        let mut sum = c(0.0, 0.0);
        if kept.contains(&(x1, x2)) {
            for &(p1, p2) in &kept {
                let (q1, q2) = (x1 - p1, x2 - p2);
                if !kept.contains(&(q1, q2)) || (q1 == 0 && q2 == 0) {
                    continue;
                }
                let r = ((q1 * q1 + q2 * q2) as f64).sqrt();
                let u1 = -c(0.0, q2 as f64 / r) * coef(q1, q2);
                let u2 = c(0.0, q1 as f64 / r) * coef(q1, q2);
                sum += coef(p1, p2) * (c(0.0, x1 as f64) * u1 + c(0.0, x2 as f64) * u2);
            }
        }
        scale = scale.max(sum.norm());
        worst = worst.max((n.mode(x1, x2) - sum).norm());
    }
    assert!(scale > 0.1);
    assert!(worst <= 1e-10 * scale, "{worst} vs {scale}");
}

#[test]
fn transport_is_energy_neutral() {
    let g = unit_grid(32, 64);
    let theta = random_spectral(&g, 5, SpectrumShape::Decay(1.0));
    let n = nonlinear_term(&theta).unwrap();
    assert!(theta.inner(&n).unwrap().abs() <= 1e-12 * theta.l2_norm().powi(2) * n.l2_norm());
}

#[test]
fn linear_step_is_exact_multiplier() {
    let g = unit_grid(16, 16);
    let theta = random_spectral(&g, 1, SpectrumShape::White);
    let regime = ScalingRegime::fixed(0.01, 0.3).unwrap();
    let cfg = SolverConfig::linear(1.0, 1.0);
    let dt = 0.37;
    let out = step(&theta, dt, &regime, &cfg).unwrap();
    let lam = linear_symbol(&g, &regime);
    let exact: Vec<Complex64> = theta.coeffs().iter().zip(&lam).map(|(v, l)| v * (-l * dt).exp()).collect();
    let exact = SpectralField::new(g.clone(), exact).unwrap();
    assert!(out.rel_distance(&exact).unwrap() <= 1e-14);
    assert!(out.conjugate_symmetry_defect() <= 1e-13 * theta.max_coeff_abs());
}

#[test]
fn nonlinear_step_keeps_data_real() {
    let g = unit_grid(32, 32);
    let theta = random_spectral(&g, 8, SpectrumShape::Decay(2.0));
    let regime = ScalingRegime::fixed(0.1, 0.5).unwrap();
    for integrator in [Integrator::Ifrk2, Integrator::Ifrk4] {
        let cfg = SolverConfig { integrator, ..SolverConfig::new(0.05, 1.0) };
        let out = step(&theta, 0.01, &regime, &cfg).unwrap();
        assert!(out.conjugate_symmetry_defect() <= 1e-13 * theta.max_coeff_abs());
    }
}

/// Slope of `log err` against `log dt` between consecutive halvings.
fn slopes(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn step_is_consistent_with_the_equation() {
    let g = unit_grid(32, 32);
    let theta = random_spectral(&g, 3, SpectrumShape::Decay(2.5));
    let regime = ScalingRegime::fixed(0.5, 0.2).unwrap();
    let cfg = SolverConfig::new(1.0, 1.0);
    let lam = linear_symbol(&g, &regime);
    let n = nonlinear_term(&theta).unwrap();
    let rhs: Vec<Complex64> = theta.coeffs().iter().zip(&lam).zip(n.coeffs()).map(|((v, l), nn)| -(l * v) - nn).collect();
    let rhs = SpectralField::new(g.clone(), rhs).unwrap();
    let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
        .iter()
        .map(|&dt| {
            let q = step(&theta, dt, &regime, &cfg).unwrap().sub(&theta).unwrap().scale(1.0 / dt);
            q.sub(&rhs).unwrap().l2_norm()
        })
        .collect();
    // first-order difference quotient
    for s in slopes(&errs) {
        assert!(s > 0.9, "{errs:?}");
    }
}

#[test]
fn local_error_matches_scheme_order() {
    let g = unit_grid(32, 32);
    let theta = random_spectral(&g, 12, SpectrumShape::Decay(2.5));
    let regime = ScalingRegime::fixed(0.5, 0.2).unwrap();
    for integrator in [Integrator::Ifrk2, Integrator::Ifrk4] {
        let cfg = SolverConfig { integrator, ..SolverConfig::new(1.0, 1.0) };
        let errs: Vec<f64> = [4e-2, 2e-2, 1e-2]
            .iter()
            .map(|&dt| {
                let one = step(&theta, dt, &regime, &cfg).unwrap();
                let half = step(&theta, dt / 2.0, &regime, &cfg).unwrap();
                let two = step(&half, dt / 2.0, &regime, &cfg).unwrap();
                one.sub(&two).unwrap().l2_norm()
            })
            .collect();
        let order = integrator.order() as f64;
        for s in slopes(&errs) {
            assert!(s >= order, "{integrator}: {errs:?}");
        }
    }
}

#[test]
fn zero_data_stays_zero() {
    let g = unit_grid(16, 16);
    let tr = integrate(&SpectralField::zeros(&g), &ScalingRegime::fixed(0.5, 0.5).unwrap(), &SolverConfig::new(0.1, 1.0))
        .unwrap();
    assert!(tr.is_valid());
    assert!(tr.snapshots.iter().all(|s| s.max_coeff_abs() == 0.0));
    assert!(tr.samples.iter().all(|s| s.energy_defect == 0.0 && s.l2 == 0.0));
}

#[test]
fn zonal_mode_follows_closed_form() {
    let g = Grid::new(GridSpec::with_sizes(16, 64).unwrap()).unwrap();
    let theta0 = SpectralField::single_mode(&g, 0, 3, c(0.4, -0.2)).unwrap();
    let nu = 0.7;
    for eps in [1.0, 0.01] {
        let regime = ScalingRegime::fixed(eps, nu).unwrap();
        let tr = integrate(&theta0, &regime, &SolverConfig::new(0.01, 1.0)).unwrap();
        assert!(tr.is_valid());
        let decay = (-nu * g.xi2(3) * 1.0).exp();
        let exact = theta0.scale(decay);
        assert_eq!(tr.final_time(), 1.0);
        assert!(tr.last_snapshot().rel_distance(&exact).unwrap() <= 1e-8);
        for s in &tr.snapshots {
            let non_zonal = s.sub(&crate::spectral::horizontal_mean(s)).unwrap();
            assert!(non_zonal.l2_norm() <= 1e-12 * theta0.l2_norm());
        }
    }
}

#[test]
fn energy_inequality_holds_on_random_small_data() {
    let g = Grid::new(GridSpec::with_sizes(32, 64).unwrap()).unwrap();
    let theta0 = random_spectral(&g, 21, SpectrumShape::Decay(3.0)).scale(0.3);
    let regime = ScalingRegime::fixed(0.5, 0.5).unwrap();
    let tr = integrate(&theta0, &regime, &SolverConfig::new(0.02, 2.0)).unwrap();
    assert!(tr.is_valid());
    let e0 = theta0.l2_norm().powi(2);
    for s in &tr.samples {
        assert!(s.energy_defect <= e0 * 10.0 * tr.dt_max.powi(2) * s.t.max(1e-300), "{s:?}");
    }
}

#[test]
fn dispersion_conserves_energy_without_viscosity() {
    let g = unit_grid(32, 32);
    let theta0 = random_spectral(&g, 6, SpectrumShape::White);
    for eps in [1.0, 0.01] {
        let tr = integrate(&theta0, &ScalingRegime::fixed(eps, 0.0).unwrap(), &SolverConfig::linear(0.05, 1.0)).unwrap();
        for s in &tr.samples {
            assert!((s.l2 - theta0.l2_norm()).abs() <= 1e-12 * theta0.l2_norm());
        }
    }
}

#[test]
fn riesz_of_zonal_data_vanishes() {
    let g = Grid::new(GridSpec::with_sizes(32, 64).unwrap()).unwrap();
    let fam = IllPreparedFamily { amp: 0.0, ..Default::default() };
    let theta = make_ill_prepared_data(&fam, 0.5, &g).unwrap();
    assert!(theta.l2_norm() > 0.0);
    assert_eq!(riesz(&theta, Axis::X1).max_coeff_abs(), 0.0);
}

#[test]
fn default_family_is_epsilon_independent() {
    let g = Grid::new(GridSpec::with_sizes(64, 128).unwrap()).unwrap();
    let fam = IllPreparedFamily::default();
    let a = make_ill_prepared_data(&fam, 0.1, &g).unwrap();
    let b = make_ill_prepared_data(&fam, 0.01, &g).unwrap();
    assert_eq!(a.l2_norm().to_bits(), b.l2_norm().to_bits());
    assert!(a.l2_norm() <= fam.l2_bound(&g).unwrap() * (1.0 + 1e-12));
    let hs = a.sobolev_norm(2.5);
    assert!(hs.is_finite() && hs > 0.0);
    let osc = fam.oscillation(&g).unwrap();
    assert_eq!(crate::spectral::horizontal_mean(&osc).max_coeff_abs(), 0.0);
    assert!(osc.l2_norm() > 0.1);
    assert!(boundary_decay(&a) < DECAY_LIMIT);
}

#[test]
fn scaled_family_and_decay_guard() {
    let g = Grid::new(GridSpec::with_sizes(32, 64).unwrap()).unwrap();
    let fam = IllPreparedFamily { amp_exponent: Some(1.0), ..Default::default() };
    let a = make_ill_prepared_data(&fam, 0.5, &g).unwrap();
    let b = make_ill_prepared_data(&fam, 0.25, &g).unwrap();
    let mean = fam.mean_profile(&g).unwrap();
    let ra = a.sub(&mean).unwrap().l2_norm();
    let rb = b.sub(&mean).unwrap().l2_norm();
    assert!((ra / rb - 2.0).abs() < 1e-12);
    let wide = IllPreparedFamily { width: 12.0, ..Default::default() };
    assert!(matches!(make_ill_prepared_data(&wide, 0.5, &g), Err(crate::SqgError::InsufficientDecay { .. })));
    assert!(make_ill_prepared_data(&fam, 0.0, &g).is_err());
}

#[test]
fn blow_up_is_flagged_not_fatal() {
    let g = unit_grid(16, 16);
    let theta0 = random_spectral(&g, 2, SpectrumShape::White).scale(50.0);
    let regime = ScalingRegime::fixed(1.0, 0.0).unwrap();
    // a loose CFL lets the explicit part blow up; the CFL cap then collapses dt
    let cfg = SolverConfig { cfl: 1e3, eps_dt_factor: None, ..SolverConfig::new(1.0, 100.0) };
    let tr = integrate(&theta0, &regime, &cfg).unwrap();
    assert!(matches!(tr.status, RunStatus::DtUnderflow { .. }), "{:?}", tr.status);
    assert!(matches!(tr.check(), Err(crate::SqgError::DtUnderflow { .. })));
    // without an effective CFL cap the state overflows instead
    let cfg = SolverConfig { cfl: 1e300, ..cfg };
    let tr = integrate(&theta0, &regime, &cfg).unwrap();
    assert!(matches!(tr.status, RunStatus::RegularityLost { .. }), "{:?}", tr.status);
    assert!(matches!(tr.check(), Err(crate::SqgError::RegularityLoss { .. })));
    assert!(!tr.samples.is_empty());

    let mut bad = theta0.clone();
    bad = bad.map(|_| c(f64::NAN, 0.0));
    assert!(nonlinear_term(&bad).is_err());
}

#[test]
fn steps_land_on_stop_times() {
    let g = unit_grid(16, 16);
    let th = random_spectral(&g, 4, SpectrumShape::Decay(3.0));
    let r = ScalingRegime::fixed(0.5, 0.1).unwrap();
    let cfg = SolverConfig { sample_every: 7, snapshot_stride: 100, stops: vec![0.35, 0.1, 0.35], ..SolverConfig::new(0.03, 0.5) };
    let tr = integrate(&th, &r, &cfg).unwrap();
    assert_eq!(tr.snapshot_times(), vec![0.0, 0.1, 0.35, 0.5]);
    let bad = SolverConfig { stops: vec![0.7], ..SolverConfig::new(0.03, 0.5) };
    assert!(integrate(&th, &r, &bad).is_err());
}
