// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Composite bodies: rigid-body reduction to a single effective particle,
//! and the two-particle example where a jump on one constituent entangles
//! centre-of-mass and relative coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::GaussianDensity;
use crate::params::{Model, ModelParams, HBAR, K_BOLTZMANN};

/// Ratio used for every "much larger than" regime check.
pub const REGIME_RATIO: f64 = 100.0;

/// `count` identical constituents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleGroup {
    pub mass: f64,
    pub lambda: f64,
    #[serde(default = "one")]
    pub count: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub particles: Vec<ParticleGroup>,
    pub rigid: bool,
}

impl BodySpec {
    pub fn validate(&self) -> Result<()> {
        if self.particles.is_empty() {
            return Err(Error::InvalidInput("body has no particles".into()));
        }
        for g in &self.particles {
            if !(g.mass > 0.0 && g.lambda > 0.0 && g.count > 0.0) || !(g.mass * g.lambda * g.count).is_finite() {
                return Err(Error::InvalidInput(format!("masses, rates and counts must be positive: {g:?}")));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|g| g.count * g.mass).sum()
    }

    pub fn total_rate(&self) -> f64 {
        self.particles.iter().map(|g| g.count * g.lambda).sum()
    }
}

/// Centre-of-mass parameters of a rigid body: `λ_T = Σλ_j`, `M_T = ΣM_j`,
/// hence `k_T = ħ/(2 M_T v_η r_c)`. Non-rigid bodies are refused.
pub fn rigid_body_reduce(body: &BodySpec, r_c: f64, v_eta: f64) -> Result<ModelParams> {
    if !body.rigid {
        return Err(Error::Regime("only rigid bodies reduce to a single centre-of-mass particle".into()));
    }
    body.validate()?;
    let p = ModelParams {
        lambda_rate: body.total_rate(),
        r_c,
        v_eta,
        mass: body.total_mass(),
        hbar: HBAR,
        k_boltzmann: K_BOLTZMANN,
    };
    p.validate()?;
    Ok(p)
}

/// `ψ(X_CM, X_REL) ∝ exp(-X_CM²/(2γ)) exp(-(X_REL - α)²/(2γ'))` for two
/// equal masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoParticleGaussian {
    pub gamma_cm: f64,
    pub gamma_rel: f64,
    pub alpha_rel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoParticleMeans {
    pub mean_x_cm: f64,
    pub mean_x_rel: f64,
}

impl TwoParticleGaussian {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_cm > 0.0 && self.gamma_rel > 0.0 && self.alpha_rel.is_finite()) {
            return Err(Error::InvalidInput(format!("widths must be positive: {self:?}")));
        }
        Ok(())
    }

    /// `k r_c² ≥ 100 max(γ, γ')`.
    pub fn in_dissipative_regime(&self, model: &Model) -> bool {
        model.k * model.r_c * model.r_c >= REGIME_RATIO * self.gamma_cm.max(self.gamma_rel)
    }
}

/// Means after a jump at `y` on particle 1, exact for every `k`:
/// `⟨X_CM⟩ = 2(α - 2y)((1-k)k r_c² - γ)/D`,
/// `⟨X_REL⟩ = (4α((1-k)r_c² + γ) - 2y(4(1-k)k r_c² - γ'))/D`,
/// `D = 4(1-k)²r_c² + 4γ + γ'`.
pub fn two_particle_jump_means(s: &TwoParticleGaussian, y: f64, model: &Model) -> TwoParticleMeans {
    let (g, gp, a) = (s.gamma_cm, s.gamma_rel, s.alpha_rel);
    let k = model.k;
    let r2 = model.r_c * model.r_c;
    let d = 4.0 * (1.0 - k) * (1.0 - k) * r2 + 4.0 * g + gp;
    TwoParticleMeans {
        mean_x_cm: 2.0 * (a - 2.0 * y) * ((1.0 - k) * k * r2 - g) / d,
        mean_x_rel: (4.0 * a * ((1.0 - k) * r2 + g) - 2.0 * y * (4.0 * (1.0 - k) * k * r2 - gp)) / d,
    }
}

/// Leading behaviour for `k r_c² ≫ γ, γ'`:
/// `⟨X_CM⟩ ≈ k(α - 2y)/(2 - 2k)`, `⟨X_REL⟩ ≈ (α - 2ky)/(1 - k)`.
pub fn two_particle_jump_means_approx(s: &TwoParticleGaussian, y: f64, model: &Model) -> TwoParticleMeans {
    let k = model.k;
    TwoParticleMeans {
        mean_x_cm: k * (s.alpha_rel - 2.0 * y) / (2.0 - 2.0 * k),
        mean_x_rel: (s.alpha_rel - 2.0 * k * y) / (1.0 - k),
    }
}

/// Post-jump variances and jump density, approximate and exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoParticlePost {
    /// `γ/2 + k²γ'/8`.
    pub var_cm: f64,
    /// `γ'/2 + 2k²γ`.
    pub var_rel: f64,
    /// `N(α/2, r_c²(1-k)²/2)`.
    pub density: GaussianDensity,
    pub var_cm_exact: f64,
    pub var_rel_exact: f64,
    pub density_exact: GaussianDensity,
    /// Whether `k r_c² ≫ γ, γ'` holds, i.e. the approximations apply.
    pub regime: bool,
}

pub fn two_particle_post_variances_and_density(s: &TwoParticleGaussian, model: &Model) -> TwoParticlePost {
    let (g, gp, a) = (s.gamma_cm, s.gamma_rel, s.alpha_rel);
    let k = model.k;
    let r2 = model.r_c * model.r_c;
    let w = model.r_c * (1.0 - k);
    let d = 4.0 * g + gp + 4.0 * (1.0 - k) * (1.0 - k) * r2;
    TwoParticlePost {
        var_cm: g / 2.0 + k * k * gp / 8.0,
        var_rel: gp / 2.0 + 2.0 * k * k * g,
        density: GaussianDensity { mean: a / 2.0, var: w * w / 2.0 },
        var_cm_exact: (g * gp + 4.0 * g * r2 + gp * k * k * r2) / (2.0 * d),
        var_rel_exact: 2.0 * (g * gp + 4.0 * g * k * k * r2 + gp * r2) / d,
        density_exact: GaussianDensity { mean: a / 2.0, var: g / 2.0 + gp / 8.0 + w * w / 2.0 },
        regime: s.in_dissipative_regime(model),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyKick {
    /// `ħ²k/(Mγ)`.
    pub delta_e: f64,
    /// Whether `r_c² ≫ γ` holds.
    pub regime: bool,
}

/// Mean energy exchanged by one jump on a narrow Gaussian.
pub fn energy_kick_estimate(gamma: f64, model: &Model) -> Result<EnergyKick> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidInput(format!("γ = {gamma} must be positive")));
    }
    Ok(EnergyKick {
        delta_e: model.hbar * model.hbar * model.k / (model.mass * gamma),
        regime: model.r_c * model.r_c >= REGIME_RATIO * gamma,
    })
}

/// Level spacing `ħ²/(Mγ')` of the oscillator whose ground state has width
/// parameter `γ'`.
pub fn level_spacing(gamma: f64, model: &Model) -> f64 {
    model.hbar * model.hbar / (model.mass * gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_particle_is_identity() {
        let body = BodySpec { particles: vec![ParticleGroup { mass: 1e-27, lambda: 1e-16, count: 1.0 }], rigid: true };
        let p = rigid_body_reduce(&body, 1e-7, crate::params::DEFAULT_V_ETA).unwrap();
        assert_eq!(p, ModelParams::default());
    }

    #[test]
    fn non_rigid_refused() {
        let body = BodySpec { particles: vec![ParticleGroup { mass: 1.0, lambda: 1.0, count: 1.0 }], rigid: false };
        assert!(matches!(rigid_body_reduce(&body, 1e-7, 1.0), Err(Error::Regime(_))));
    }

    #[test]
    fn grw_leaves_means_near_alpha() {
        let m = Model::new(HBAR, 1e-27, 1e-7, 0.0, 1e-16).unwrap();
        let s = TwoParticleGaussian { gamma_cm: 1e-30, gamma_rel: 1e-30, alpha_rel: 1e-15 };
        let means = two_particle_jump_means(&s, 3e-8, &m);
        assert!((means.mean_x_rel - 1e-15).abs() < 1e-6 * 1e-15);
    }

    #[test]
    fn grw_variances_unchanged() {
        let m = Model::new(HBAR, 1e-27, 1e-7, 0.0, 1e-16).unwrap();
        let s = TwoParticleGaussian { gamma_cm: 1e-22, gamma_rel: 5e-29, alpha_rel: 1e-15 };
        let post = two_particle_post_variances_and_density(&s, &m);
        assert_eq!(post.var_cm, 5e-23);
        assert_eq!(post.var_rel, 2.5e-29);
    }

    #[test]
    fn kick_scales_inversely_with_width() {
        let m = Model::new(HBAR, 1e-27, 1e-7, 5e-5, 1e-16).unwrap();
        let a = energy_kick_estimate(1e-20, &m).unwrap().delta_e;
        let b = energy_kick_estimate(5e-21, &m).unwrap().delta_e;
        assert!((b / a - 2.0).abs() < 1e-14);
        let m0 = Model { k: 0.0, ..m };
        assert_eq!(energy_kick_estimate(1e-20, &m0).unwrap().delta_e, 0.0);
    }
}
