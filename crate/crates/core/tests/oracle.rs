// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Analytic results checked against each other and against independent
//! evaluations: quadrature drifts, characteristic-function moments, the
//! stationary cycle, and a high-precision evaluation of the closed forms.

use dashu_float::FBig;
use dgrw_core::oracle::{
    asymptotic_variances, chi_moments, closed_form_variances, exact_moments, free_variance, iterate_cycle, mean_energy,
    mean_momentum, momentum_transfer_checks, var_x_rho, Moments2,
};
use dgrw_core::{Complex64, GaussianState, Model, Preset};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn states() -> Vec<GaussianState> {
    vec![
        GaussianState::real(0.0, 0.0, 1.0).unwrap(),
        GaussianState::real(0.4, 2.5, 0.3).unwrap(),
        GaussianState::new(Complex64::new(0.2, 0.3), -1.2, Complex64::new(0.8, -0.6)).unwrap(),
        GaussianState::new(Complex64::new(-1.0, -0.1), 0.7, Complex64::new(3.0, 2.0)).unwrap(),
    ]
}

#[test]
fn momentum_transfer_matches_closed_drifts() {
    for k in [0.0, 0.05, 0.3] {
        let m = Model::dimensionless(k, 1.0).unwrap();
        for s in states() {
            let mt = momentum_transfer_checks(&s, &m).unwrap();
            let p_scale = mt.dp_dt_closed.abs().max(1e-300);
            if s.observables(&m).mean_p == 0.0 || k == 0.0 {
                assert!(mt.dp_dt.abs() < 1e-9, "k={k} dp={}", mt.dp_dt);
            } else {
                assert!(rel(mt.dp_dt, mt.dp_dt_closed) < 1e-6, "k={k} {mt:?} scale={p_scale}");
            }
            assert!(rel(mt.dh_dt, mt.dh_dt_closed) < 1e-6, "k={k} {mt:?}");
        }
    }
}

#[test]
fn momentum_transfer_in_si_units() {
    let m = Preset::Grw1986.params().model_si().unwrap();
    let s = GaussianState::real(0.0, 3.0 * m.hbar / m.r_c, 0.5 * m.r_c * m.r_c).unwrap();
    let mt = momentum_transfer_checks(&s, &m).unwrap();
    assert!(rel(mt.dp_dt, mt.dp_dt_closed) < 1e-6, "{mt:?}");
    assert!(rel(mt.dh_dt, mt.dh_dt_closed) < 1e-6, "{mt:?}");
}

#[test]
fn chi_moments_match_closed_forms() {
    let s0 = GaussianState::new(Complex64::new(0.3, 0.1), 0.8, Complex64::new(0.9, 0.4)).unwrap();
    for k in [0.0, 0.05, 0.3] {
        let m = Model::dimensionless(k, 1.0).unwrap();
        let o = s0.observables(&m);
        for t in [0.0, 0.5, 2.0, 7.0] {
            let cm = chi_moments(t, &s0, &m, 1e-3, 1e-3).unwrap();
            let free_mean = o.mean_x + o.mean_p * t / m.mass;
            assert!((cm.mean_x - free_mean).abs() < 1e-6 * free_mean.abs().max(1.0), "k={k} t={t} {cm:?}");
            let closed = var_x_rho(free_variance(&s0, t, &m), t, &m);
            assert!(rel(cm.var_x, closed) < 1e-6, "k={k} t={t} {} {closed}", cm.var_x);
            if k == 0.0 {
                let em = exact_moments(&s0, t, &m);
                assert!(rel(cm.var_x, em.var_x()) < 1e-6, "t={t}");
            }
        }
    }
}

#[test]
fn chi_mean_momentum_needs_small_k() {
    // The averaged momentum is constant in the closed-form χ, which is exact
    // only as k → 0; at k = 1e-9 the damping is invisible at 1e-6.
    let m = Model::dimensionless(1e-9, 1.0).unwrap();
    let s0 = GaussianState::real(0.1, 1.7, 1.2).unwrap();
    for t in [0.5, 3.0] {
        let cm = chi_moments(t, &s0, &m, 1e-3, 1e-3).unwrap();
        assert!(rel(cm.mean_p, mean_momentum(1.7, t, &m)) < 1e-6, "{cm:?}");
    }
}

#[test]
fn exact_moments_follow_mean_laws() {
    let s0 = GaussianState::new(Complex64::new(0.0, 0.2), 1.1, Complex64::new(0.6, 0.1)).unwrap();
    for k in [0.01, 0.2] {
        let m = Model::dimensionless(k, 2.0).unwrap();
        let h0 = Moments2::of_state(&s0, &m).energy(&m);
        for t in [0.1, 1.0, 10.0, 50.0] {
            let em = exact_moments(&s0, t, &m);
            let p0 = s0.observables(&m).mean_p;
            assert!(rel(em.mean_p, mean_momentum(p0, t, &m)) < 1e-10);
            assert!(rel(em.energy(&m), mean_energy(h0, t, &m)) < 1e-10);
        }
    }
}

fn eps_grid() -> Vec<f64> {
    (0..20).map(|i| 10f64.powf(-24.0 + 48.0 * i as f64 / 19.0)).collect()
}

#[test]
fn fixed_point_residual_across_scales() {
    for k in [5e-29, 5e-5, 0.05] {
        for eps in eps_grid() {
            let m = Model::dimensionless(k, eps).unwrap();
            let a = asymptotic_variances(&m).unwrap_or_else(|e| panic!("k={k} eps={eps}: {e}"));
            assert!(a.residual <= 1e-10, "k={k} eps={eps} residual={}", a.residual);
            assert!(a.gamma_eq.re > 0.0);
            assert!(rel(a.var_x, a.var_x_closed) < 1e-8, "k={k} eps={eps} {a:?}");
            assert!(rel(a.var_p, a.var_p_closed) < 1e-8, "k={k} eps={eps} {a:?}");
        }
    }
}

#[test]
fn iterated_cycle_converges_to_fixed_point() {
    for k in [5e-5, 0.05, 0.5] {
        for eps in [1e-3, 1.0, 1e3] {
            let m = Model::dimensionless(k, eps).unwrap();
            let a = asymptotic_variances(&m).unwrap();
            let g = iterate_cycle(&m, eps, Complex64::new(1.0, 0.0));
            assert!((g - a.gamma_eq).norm() / a.gamma_eq.norm() < 1e-9, "k={k} eps={eps}");
        }
    }
}

/// Closed forms evaluated in the textbook arrangement at 400 bits, where the
/// cancellations that the f64 code avoids are harmless.
fn closed_form_high_precision(g: f64, eps: f64, r: f64) -> (f64, f64) {
    let prec = 400;
    let f = |x: f64| -> FBig { FBig::try_from(x).unwrap().with_precision(prec).value() };
    let (g, eps, r) = (f(g), f(eps), f(r));
    let one = f(1.0);
    let two = f(2.0);
    let q = &g / &eps;
    let u = &q * &q + &one;
    let w = f(16.0) * &r * (&r - &g) / (&eps * &eps);
    let chi = (&u * &u + &w).sqrt();
    let var_x = &r / (&one + ((&chi - &u + &two) / &two).sqrt());
    let inv_var_p = &g + &eps * ((&chi + &q * &q - &one) / &two).sqrt();
    (var_x.to_f64().value(), inv_var_p.to_f64().value())
}

#[test]
fn closed_forms_agree_with_extended_precision() {
    for k in [5e-29, 5e-5, 0.05] {
        for eps in eps_grid() {
            let (g, r) = (4.0 * k, (1.0 + k) * (1.0 + k));
            let (vx, ivp) = closed_form_variances(g, eps, r);
            let (hx, hvp) = closed_form_high_precision(g, eps, r);
            assert!(rel(vx, hx) < 1e-13, "k={k} eps={eps}: {vx:e} vs {hx:e}");
            assert!(rel(ivp, hvp) < 1e-13, "k={k} eps={eps}: {ivp:e} vs {hvp:e}");
        }
    }
}

#[test]
fn macro_preset_asymptotics() {
    let p = Preset::Macro1g.params();
    let a = asymptotic_variances(&p.model_si().unwrap()).unwrap();
    let hb = p.hbar;
    // Position variance lands at 7.25e-27 m², momentum variance at 7.65e-43.
    assert!(rel(a.var_x, 7.25e-27) < 0.01, "{a:?}");
    assert!(rel(a.var_p, 7.65e-43) < 0.01, "{a:?}");
    assert!(rel(a.var_x * a.var_p / (hb * hb / 4.0), 2.0) < 0.2);
}
