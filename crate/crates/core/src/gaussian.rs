// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form Gaussian wavefunctions
//! `ψ(X) = C exp(-(X-α)²/(2γ)) exp(iβ(X-α)/ħ)` with complex `α`, `γ` and
//! real `β`.
//!
//! Free evolution and localization jumps both map this family onto itself.
//! States are stored without a global phase, and the normalization constant
//! is recomputed from `(α, β, γ)` whenever it is needed.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, GridFlag, Result};
use crate::grid::GridWavefunction;
use crate::params::Model;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub alpha: Complex64,
    pub beta: f64,
    pub gamma: Complex64,
}

/// Moments of a Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub mean_x: f64,
    pub var_x: f64,
    pub mean_p: f64,
    pub var_p: f64,
    /// Symmetrized covariance `⟨XP + PX⟩/2 - ⟨X⟩⟨P⟩`.
    pub cov_xp: f64,
    pub kinetic_energy: f64,
}

/// A normal density `N(mean, var)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianDensity {
    pub mean: f64,
    pub var: f64,
}

impl GaussianDensity {
    pub fn pdf(&self, y: f64) -> f64 {
        let d = y - self.mean;
        (-d * d / (2.0 * self.var)).exp() / (2.0 * PI * self.var).sqrt()
    }

    pub fn std_dev(&self) -> f64 {
        self.var.sqrt()
    }
}

/// Width update of a jump, `γ' = (s²/γ + 1/R)⁻¹`, shared with the
/// times-only sampler so both paths produce identical widths.
#[inline]
pub fn jump_width(gamma: Complex64, model: &Model) -> Complex64 {
    let s = model.contraction();
    let big_gamma = s * s / gamma + 1.0 / model.envelope_var();
    1.0 / big_gamma
}

/// Width update of free evolution, `γ + iħ dt/M`.
#[inline]
pub fn free_width(gamma: Complex64, dt: f64, model: &Model) -> Complex64 {
    gamma + Complex64::new(0.0, model.hbar * dt / model.mass)
}

/// Position variance `|γ|²/(2 Re γ)` implied by a width parameter.
#[inline]
pub fn width_variance(gamma: Complex64) -> f64 {
    gamma.norm_sqr() / (2.0 * gamma.re)
}

impl GaussianState {
    pub fn new(alpha: Complex64, beta: f64, gamma: Complex64) -> Result<Self> {
        let s = Self { alpha, beta, gamma };
        s.check()?;
        Ok(s)
    }

    /// Real-parameter state: mean `x`, momentum `p`, position variance `γ/2`.
    pub fn real(x: f64, p: f64, gamma: f64) -> Result<Self> {
        Self::new(Complex64::new(x, 0.0), p, Complex64::new(gamma, 0.0))
    }

    pub fn check(&self) -> Result<()> {
        if !(self.gamma.re > 0.0) || !self.gamma.im.is_finite() {
            return Err(Error::InvalidInput(format!("Re γ must be positive, got γ = {}", self.gamma)));
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite() && self.beta.is_finite()) {
            return Err(Error::InvalidInput("non-finite α or β".into()));
        }
        Ok(())
    }

    pub fn free_evolve(&self, dt: f64, model: &Model) -> Self {
        Self {
            alpha: self.alpha + self.beta * dt / model.mass,
            beta: self.beta,
            gamma: free_width(self.gamma, dt, model),
        }
    }

    /// Jump factor `g_γ = s Γ / Γ'` with `Γ = 1/γ` and `Γ' = s²Γ + 1/R`.
    pub fn jump_gain(&self, model: &Model) -> Complex64 {
        let s = model.contraction();
        let inv = 1.0 / self.gamma;
        let inv_after = s * s * inv + 1.0 / model.envelope_var();
        s * inv / inv_after
    }

    /// Localization jump centred at `y`, followed by renormalization.
    pub fn apply_jump(&self, y: f64, model: &Model) -> Self {
        let g = self.jump_gain(model);
        Self {
            alpha: g * self.alpha + (1.0 - g) * y,
            beta: self.beta * model.contraction(),
            gamma: jump_width(self.gamma, model),
        }
    }

    /// Density of the jump centre, `p(y) = ‖L_y ψ‖²`.
    ///
    /// `|L_y ψ|²` integrates to `|ψ|²` convolved with `N(0, r_c²(1-k)²/2)`,
    /// so for a Gaussian the density is normal with the state's mean position
    /// and the sum of both variances.
    pub fn jump_position_density(&self, model: &Model) -> GaussianDensity {
        let w = model.r_c * (1.0 - model.k);
        let obs = self.observables(model);
        GaussianDensity { mean: obs.mean_x, var: obs.var_x + 0.5 * w * w }
    }

    pub fn observables(&self, model: &Model) -> Observables {
        let (ar, ai) = (self.alpha.re, self.alpha.im);
        let (gr, gi) = (self.gamma.re, self.gamma.im);
        let hbar = model.hbar;
        let mean_x = ar + gi / gr * ai;
        let var_x = width_variance(self.gamma);
        let mean_p = self.beta + hbar * ai / gr;
        let var_p = hbar * hbar / (2.0 * gr);
        Observables {
            mean_x,
            var_x,
            mean_p,
            var_p,
            cov_xp: hbar * gi / (2.0 * gr),
            kinetic_energy: (var_p + mean_p * mean_p) / (2.0 * model.mass),
        }
    }

    /// `ln C` for the normalization constant.
    pub fn log_norm_const(&self, model: &Model) -> f64 {
        let gr = self.gamma.re;
        let ai = self.alpha.im;
        -0.25 * (PI * self.gamma.norm_sqr() / gr).ln() - ai * ai / (2.0 * gr) - self.beta * ai / model.hbar
    }

    /// `ψ(x)`, evaluated in log space so that wide grids do not underflow
    /// before the prefactor is applied.
    pub fn amplitude(&self, x: f64, model: &Model) -> Complex64 {
        let d = x - self.alpha;
        let phase = Complex64::new(0.0, self.beta / model.hbar) * d;
        (self.log_norm_const(model) - d * d / (2.0 * self.gamma) + phase).exp()
    }

    /// Samples `ψ` on a uniform grid; errors when the grid misses more than
    /// `1e-6` of the norm.
    pub fn evaluate_on_grid(&self, x0: f64, dx: f64, n: usize, model: &Model) -> Result<GridWavefunction> {
        let amplitudes = (0..n).map(|j| self.amplitude(x0 + j as f64 * dx, model)).collect();
        let psi = GridWavefunction::new(x0, dx, amplitudes)?;
        let deficit = 1.0 - psi.norm_sqr();
        if deficit.abs() > 1e-6 {
            return Err(GridFlag::TooNarrow { deficit }.into());
        }
        Ok(psi)
    }

    /// Grid spanning `mean ± half_width` standard deviations.
    pub fn auto_grid(&self, half_width: f64, n: usize, model: &Model) -> Result<GridWavefunction> {
        let obs = self.observables(model);
        let reach = half_width * obs.var_x.sqrt();
        let dx = 2.0 * reach / n as f64;
        self.evaluate_on_grid(obs.mean_x - reach, dx, n, model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(k: f64) -> Model {
        Model::dimensionless(k, 1.0).unwrap()
    }

    #[test]
    fn grw_jump_halves_unit_width() {
        let m = model(0.0);
        let s = GaussianState::real(0.3, 1.5, 1.0).unwrap();
        let j = s.apply_jump(2.0, &m);
        assert!((j.alpha - Complex64::new(1.15, 0.0)).norm() < 1e-15);
        assert!((j.gamma - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(j.beta, 1.5);
        assert!((s.jump_position_density(&m).var - 1.0).abs() < 1e-15);
    }

    #[test]
    fn momentum_contraction() {
        let m = model(0.1);
        let s = GaussianState::new(Complex64::new(0.1, 0.2), 2.0, Complex64::new(0.7, 0.4)).unwrap();
        assert!((s.apply_jump(-0.4, &m).beta - 2.0 * 0.9 / 1.1).abs() < 1e-15);
    }

    #[test]
    fn real_state_observables() {
        let m = model(0.0);
        let s = GaussianState::real(1.0, -2.0, 3.0).unwrap();
        let o = s.observables(&m);
        assert_eq!((o.mean_x, o.var_x, o.mean_p, o.var_p), (1.0, 1.5, -2.0, 1.0 / 6.0));
    }

    #[test]
    fn uncertainty_product() {
        let m = model(0.0);
        let s = GaussianState::new(Complex64::new(0.0, 0.0), 0.0, Complex64::new(2.0, 3.0)).unwrap();
        let o = s.observables(&m);
        assert!((o.var_x * o.var_p - 0.25 * (1.0 + 2.25)).abs() < 1e-14);
    }

    #[test]
    fn threshold_direction() {
        let m = model(0.05);
        let thr = m.gamma_thr();
        for (g, grows) in [(0.5 * thr, true), (2.0 * thr, false), (10.0, false)] {
            let s = GaussianState::real(0.0, 0.0, g).unwrap();
            let after = s.apply_jump(0.0, &m).observables(&m).var_x;
            assert_eq!(after > g / 2.0, grows, "γ = {g}");
        }
    }

    #[test]
    fn rejects_non_normalizable() {
        assert!(GaussianState::real(0.0, 0.0, 0.0).is_err());
        assert!(GaussianState::new(Complex64::new(0.0, 0.0), 0.0, Complex64::new(-1.0, 1.0)).is_err());
    }
}
