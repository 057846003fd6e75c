// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Gauss-Legendre quadrature with an explicit convergence check.
//!
//! Each panel is integrated with a 20-point and a 41-point rule. Their
//! difference is the error estimate, and panels above their share of the
//! tolerance are bisected.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Maximum bisection depth, i.e. at most `2^16` panels.
const MAX_DEPTH: u32 = 16;

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| {
        let rule = |n| GaussLegendre::new(NonZeroUsize::new(n).expect("nonzero degree"));
        (rule(20), rule(41))
    })
}

/// `(integral, error estimate)` on one panel.
fn panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let (lo, hi) = rules();
    let fine = hi.integrate(a, b, f);
    (fine, (fine - lo.integrate(a, b, f)).abs())
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64) {
    let (i, e) = panel(f, a, b);
    if e <= tol || depth == 0 || !i.is_finite() {
        return (i, e);
    }
    let m = 0.5 * (a + b);
    let (i1, e1) = adaptive(f, a, m, 0.5 * tol, depth - 1);
    let (i2, e2) = adaptive(f, m, b, 0.5 * tol, depth - 1);
    (i1 + i2, e1 + e2)
}

/// `∫_a^b f` to absolute tolerance `tol`. Errors when the summed error
/// estimate stays above `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (integral, estimate) = adaptive(&f, a, b, tol, MAX_DEPTH);
    if !(estimate <= tol) || !integral.is_finite() {
        return Err(Error::Quadrature { estimate, tolerance: tol });
    }
    Ok(integral)
}

/// `∫_a^b f` with error estimate at most `max(rel·∫|f|, abs)`. Scaling by
/// `∫|f|` keeps the target meaningful for integrals that cancel to near
/// zero.
pub fn integrate_rel(f: impl Fn(f64) -> f64, a: f64, b: f64, rel: f64, abs: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (l1, _) = adaptive(&|x| f(x).abs(), a, b, 1e-3 * panel(&|x| f(x).abs(), a, b).0, 6);
    integrate(f, a, b, (rel * l1).max(abs))
}
