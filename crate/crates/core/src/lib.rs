// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Dissipative GRW collapse model: exact Gaussian trajectories, grid
//! wavefunctions for arbitrary states, and analytic reference results.

// Negated comparisons such as `!(x > 0.0)` are used on purpose so that NaN
// inputs fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplify;
pub mod error;
pub mod gaussian;
pub mod grid;
pub mod io;
pub mod oracle;
pub mod params;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod trajectory;

pub use error::{Error, GridFlag, Result};
pub use gaussian::{GaussianDensity, GaussianState, Observables};
pub use grid::{GridWavefunction, Interpolation};
pub use num_complex::Complex64;
pub use params::{DerivedParams, Model, ModelParams, Preset, Quantity, UnitMode, UnitSystem};
pub use trajectory::{EnsembleSeries, Flow, Observable, Series, TrajectoryRecord};
