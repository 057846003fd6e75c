// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Grid wavefunctions against the closed-form Gaussian family, and the
//! localization of a two-peak superposition.

use dgrw_core::grid::{apply_jump_grid, free_evolve_grid, superposition_experiment, Superposition};
use dgrw_core::rng::StreamRng;
use dgrw_core::{Complex64, Error, GaussianState, GridFlag, GridWavefunction, Interpolation, Model};
use statrs::function::erf::erf;

fn random_case(rng: &mut StreamRng, k: f64) -> (GaussianState, Model, f64) {
    let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.uniform();
    let s = GaussianState::new(
        Complex64::new(u(-2.0, 2.0), u(-0.3, 0.3)),
        u(-2.0, 2.0),
        Complex64::new(u(0.1, 2.0), u(-1.5, 1.5)),
    )
    .unwrap();
    let m = Model::dimensionless(k, u(0.5, 2.0)).unwrap();
    let y = s.observables(&m).mean_x + u(-1.5, 1.5);
    (s, m, y)
}

fn grid_for(s: &GaussianState, m: &Model, y: f64, n: usize) -> GridWavefunction {
    let o = s.observables(m);
    let lo = (o.mean_x - 14.0 * o.var_x.sqrt()).min(y - 8.0);
    let hi = (o.mean_x + 14.0 * o.var_x.sqrt()).max(y + 8.0);
    s.evaluate_on_grid(lo, (hi - lo) / n as f64, n, m).unwrap()
}

#[test]
fn grid_jump_matches_gaussian_jump() {
    let mut rng = StreamRng::new(2024, 0);
    let mut worst: f64 = 0.0;
    for case in 0..200 {
        let k = if case % 4 == 0 { 0.0 } else { 0.3 * rng.uniform() };
        let (s, m, y) = random_case(&mut rng, k);
        let psi = grid_for(&s, &m, y, 4096);
        let j = apply_jump_grid(&psi, y, &m, Interpolation::Cubic).unwrap();
        let exact = s.apply_jump(y, &m).evaluate_on_grid(psi.x0, psi.dx, psi.n(), &m).unwrap();
        let d = j.psi.distance_up_to_phase(&exact);
        worst = worst.max(d);
        assert!(d <= 1e-5, "case {case}: k = {k}, distance {d:e}");
        // Jump probability density against the closed form.
        let p = s.jump_position_density(&m).pdf(y);
        assert!((j.norm_sqr - p).abs() <= 1e-6 * p.max(1e-3), "case {case}: {} vs {p}", j.norm_sqr);
    }
    eprintln!("worst grid/Gaussian jump distance: {worst:e}");
}

#[test]
fn grw_jump_reduces_variance_and_density() {
    let m = Model::dimensionless(0.0, 1.0).unwrap();
    let s = GaussianState::real(0.5, 0.0, 0.6).unwrap();
    let y = 1.3;
    let j = s.apply_jump(y, &m);
    // σ² ↦ σ² r_c²/(2σ² + r_c²) with σ² = γ/2.
    let sig2 = 0.3;
    assert!((j.observables(&m).var_x - sig2 / (2.0 * sig2 + 1.0)).abs() < 1e-15);
    // p(y) = N(⟨X⟩, σ² + r_c²/2).
    let d = s.jump_position_density(&m);
    assert_eq!(d.mean, 0.5);
    assert!((d.var - (sig2 + 0.5)).abs() < 1e-15);
}

#[test]
fn spectral_free_evolution_is_exact() {
    let m = Model::dimensionless(0.0, 1.0).unwrap();
    let s = GaussianState::new(Complex64::new(-1.0, 0.1), 1.5, Complex64::new(0.5, 0.2)).unwrap();
    let psi = s.evaluate_on_grid(-40.0, 80.0 / 2048.0, 2048, &m).unwrap();
    let later = free_evolve_grid(&psi, 3.0, &m).unwrap();
    let exact = s.free_evolve(3.0, &m).evaluate_on_grid(psi.x0, psi.dx, psi.n(), &m).unwrap();
    let d = later.distance_up_to_phase(&exact);
    assert!(d < 1e-10, "{d:e} {:?} {:?}", later.position_moments(), exact.position_moments());
}

#[test]
fn free_evolution_flags_boundary_leak() {
    let m = Model::dimensionless(0.0, 1.0).unwrap();
    let s = GaussianState::real(0.0, 6.0, 0.5).unwrap();
    let psi = s.evaluate_on_grid(-8.0, 16.0 / 1024.0, 1024, &m).unwrap();
    let r = free_evolve_grid(&psi, 1.5, &m);
    assert!(matches!(r, Err(Error::Grid(GridFlag::BoundaryLeak { .. }))), "{r:?}");
}

#[test]
fn undersampled_state_flags_aliasing() {
    let m = Model::dimensionless(0.0, 1.0).unwrap();
    let s = GaussianState::real(0.0, 40.0, 1.0).unwrap();
    let psi = s.evaluate_on_grid(-10.0, 20.0 / 256.0, 256, &m).unwrap();
    assert!(matches!(free_evolve_grid(&psi, 0.1, &m), Err(Error::Grid(GridFlag::Aliasing { .. }))));
}

#[test]
fn peak_mass_matches_superposition_weight() {
    // Mass within 5σ̃ of +α after a jump at y ≈ +α is |c₊|²(1 - 5.733e-7),
    // σ̃² = (γ + (1-k)² r_c²)/2.
    let m = Model::dimensionless(5e-5, 1.0).unwrap();
    let (alpha, gamma) = (10.0, 0.01);
    let sigma = ((gamma + (1.0 - m.k).powi(2)) / 2.0).sqrt();
    let n = 5.0;
    let inside = erf(n / std::f64::consts::SQRT_2);
    assert!(((1.0 - inside) - 5.733e-7).abs() < 1e-9);
    let sup = Superposition {
        alpha,
        gamma,
        c_plus: Complex64::new(0.8f64.sqrt(), 0.0),
        c_minus: Complex64::new(0.2f64.sqrt(), 0.0),
    };
    let psi = sup.on_grid(4096, &m).unwrap();
    let ys: Vec<f64> = (0..psi.n()).map(|j| psi.x(j)).collect();
    let dens = dgrw_core::grid::jump_density_grid(&psi, &ys, &m, Interpolation::Cubic).unwrap();
    let near_plus: f64 = ys
        .windows(2)
        .zip(dens.windows(2))
        .filter(|(y, _)| (y[0] - alpha).abs() <= n * sigma && (y[1] - alpha).abs() <= n * sigma)
        .map(|(y, p)| 0.5 * (y[1] - y[0]) * (p[0] + p[1]))
        .sum();
    assert!((near_plus - 0.8 * inside).abs() < 1e-3, "{near_plus}");
}

#[test]
fn born_rule_small_sample() {
    let m = Model::dimensionless(5e-5, 1.0).unwrap();
    let sup = Superposition {
        alpha: 10.0,
        gamma: 0.01,
        c_plus: Complex64::new(0.5f64.sqrt(), 0.0),
        c_minus: Complex64::new(0.0, 0.5f64.sqrt()),
    };
    let stats = superposition_experiment(&sup, &m, 2048, 2000, 11).unwrap();
    assert_eq!(stats.undecided, 0);
    assert!((stats.frequency_plus - 0.5).abs() < 3.0 * stats.std_error, "{stats:?}");
}

#[test]
fn superposition_regime_is_checked() {
    let m = Model::dimensionless(5e-5, 1.0).unwrap();
    let close =
        Superposition { alpha: 3.0, gamma: 0.01, c_plus: Complex64::new(1.0, 0.0), c_minus: Complex64::new(0.0, 0.0) };
    assert!(matches!(close.check(&m), Err(Error::Regime(_))));
}
