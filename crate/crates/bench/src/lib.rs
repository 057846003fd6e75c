// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Shared inputs for the benchmarks.

use dgrw_core::{Complex64, GaussianState, GridWavefunction, Model};

/// A dissipative model in dimensionless units.
pub fn model() -> Model {
    Model::dimensionless(0.05, 1.0).expect("valid model")
}

/// A moving, chirped Gaussian.
pub fn state() -> GaussianState {
    GaussianState::new(Complex64::new(0.3, 0.1), 1.2, Complex64::new(0.8, 0.4)).expect("valid state")
}

/// `state()` on `n` points wide enough for jumps near its centre.
pub fn grid_state(n: usize) -> GridWavefunction {
    let m = model();
    state().evaluate_on_grid(-20.0, 40.0 / n as f64, n, &m).expect("valid grid")
}
