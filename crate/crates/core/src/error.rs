// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the simulator and the oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown quantity kind `{0}`")]
    UnknownQuantity(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("regime precondition violated: {0}")]
    Regime(String),

    #[error("malformed trajectory record: {0}")]
    Record(String),

    #[error("grid: {0}")]
    Grid(#[from] GridFlag),

    #[error("quadrature did not converge: estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("fixed-point residual {residual:e} exceeds {tolerance:e}")]
    FixedPoint { residual: f64, tolerance: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Numerical conditions detected on a grid wavefunction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridFlag {
    #[error("rescaled jump argument truncates probability mass {mass:e}")]
    Truncation { mass: f64 },

    #[error("momentum support reaches the Nyquist band (spectral mass {mass:e})")]
    Aliasing { mass: f64 },

    #[error("probability leaked to the grid boundary (mass {mass:e})")]
    BoundaryLeak { mass: f64 },

    #[error("grid too narrow: norm deficit {deficit:e}")]
    TooNarrow { deficit: f64 },

    #[error("jump-position range misses mass {deficit:e}")]
    InsufficientRange { deficit: f64 },

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
