// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Property tests for identities that hold exactly, or to quadrature
//! accuracy, for every state and parameter choice.

use dgrw_core::grid::{apply_jump_grid, jump_density_grid, trapezoid};
use dgrw_core::oracle::Moments2;
use dgrw_core::quad;
use dgrw_core::{Complex64, GaussianState, Interpolation, Model};
use proptest::prelude::*;

fn state() -> impl Strategy<Value = GaussianState> {
    (-2.0..2.0f64, -0.5..0.5f64, -3.0..3.0f64, 0.05..3.0f64, -2.0..2.0f64)
        .prop_map(|(ar, ai, b, gr, gi)| GaussianState::new(Complex64::new(ar, ai), b, Complex64::new(gr, gi)).unwrap())
}

/// `k` up to 0.4 keeps `sup_ψ ‖L_y ψ‖² = 1/(√π(1-k))` at or below one in
/// units of `r_c`.
fn model() -> impl Strategy<Value = Model> {
    (prop_oneof![Just(0.0), 0.0..0.4f64], 0.1..10.0f64).prop_map(|(k, eps)| Model::dimensionless(k, eps).unwrap())
}

/// Grid covering both the state and the likely jump centres.
fn wide_grid(s: &GaussianState, m: &Model) -> dgrw_core::GridWavefunction {
    let o = s.observables(m);
    let reach = (12.0 * o.var_x.sqrt()).max(10.0 * s.jump_position_density(m).std_dev());
    let n = 4096;
    s.evaluate_on_grid(o.mean_x - reach, 2.0 * reach / n as f64, n, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jump_width_ignores_jump_centre(s in state(), m in model(), y1 in -5.0..5.0f64, y2 in -5.0..5.0f64) {
        prop_assert_eq!(s.apply_jump(y1, &m).gamma, s.apply_jump(y2, &m).gamma);
    }

    #[test]
    fn momentum_parameter_contracts_exactly(s in state(), m in model(), y in -5.0..5.0f64) {
        let after = s.apply_jump(y, &m);
        prop_assert_eq!(after.beta, s.beta * m.contraction());
        let ratio = (1.0 - m.k) / (1.0 + m.k);
        prop_assert!((after.beta - s.beta * ratio).abs() <= 2.0 * f64::EPSILON * s.beta.abs());
    }

    #[test]
    fn jump_density_is_normalized(s in state(), m in model()) {
        let d = s.jump_position_density(&m);
        let sd = d.std_dev();
        let total = quad::integrate(|y| d.pdf(y), d.mean - 40.0 * sd, d.mean + 40.0 * sd, 1e-13).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_jump_density_is_normalized(s in state(), m in model()) {
        let d = s.jump_position_density(&m);
        let psi = wide_grid(&s, &m);
        let ys: Vec<f64> = (0..801).map(|i| d.mean + d.std_dev() * (-8.0 + 16.0 * i as f64 / 800.0)).collect();
        let p = jump_density_grid(&psi, &ys, &m, Interpolation::Cubic).unwrap();
        prop_assert!((trapezoid(&ys, &p) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn uncertainty_holds_before_and_after_jumps(s in state(), m in model(), y in -3.0..3.0f64, dt in 0.0..5.0f64) {
        let bound = 0.25 * m.hbar * m.hbar * (1.0 - 1e-12);
        for st in [s, s.apply_jump(y, &m), s.free_evolve(dt, &m).apply_jump(y, &m)] {
            let o = st.observables(&m);
            prop_assert!(o.var_x * o.var_p >= bound);
            let mo = Moments2::of_state(&st, &m);
            prop_assert!(mo.var_x() * mo.var_p() >= bound);
        }
    }

    #[test]
    fn jumps_are_contractive(s in state(), m in model(), y in -3.0..3.0f64) {
        prop_assert!(s.jump_position_density(&m).pdf(y) <= 1.0);
        let psi = wide_grid(&s, &m);
        let j = apply_jump_grid(&psi, s.observables(&m).mean_x + y, &m, Interpolation::Cubic).unwrap();
        prop_assert!(j.norm_sqr <= 1.0);
    }

    #[test]
    fn free_flow_and_jumps_keep_states_valid(s in state(), m in model(), y in -3.0..3.0f64, dt in 0.0..5.0f64) {
        let after = s.free_evolve(dt, &m).apply_jump(y, &m);
        prop_assert!(after.check().is_ok());
        prop_assert!(after.gamma.re > 0.0);
    }
}
