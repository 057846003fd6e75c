// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form predictions of the averaged dynamics, each paired with an
//! independent numerical evaluation where one is cheap.

use std::cell::Cell;
use std::f64::consts::PI;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{free_width, width_variance, GaussianState};
use crate::params::{Model, ModelParams};
use crate::quad;

/// Tolerance on the fixed-point residual of the asymptotic width.
pub const FIXED_POINT_TOL: f64 = 1e-10;

/// `⟨P⟩_t = p₀ exp(-2kλt/(1+k))`.
pub fn mean_momentum(p0: f64, t: f64, model: &Model) -> f64 {
    p0 * (-model.momentum_damping() * t).exp()
}

/// `⟨H⟩_t = (h₀ - H_as) e^{-ξt} + H_as`; linear heating when `k = 0`.
pub fn mean_energy(h0: f64, t: f64, model: &Model) -> f64 {
    if model.k == 0.0 {
        return h0 + model.heating_rate() * t;
    }
    // Relaxation written around h0 so small k does not cancel against h_as.
    h0 - (model.h_as() - h0) * (-model.xi() * t).exp_m1()
}

/// Position variance of the free evolution of `s0`.
pub fn free_variance(s0: &GaussianState, t: f64, model: &Model) -> f64 {
    width_variance(free_width(s0.gamma, t, model))
}

/// Small-`k` spread `free_var + 2k²r_c²λt + ħ²λt³/(6 r_c²(1+k)² M²)`.
pub fn var_x_rho(free_var: f64, t: f64, model: &Model) -> f64 {
    let Model { hbar, mass, r_c, k, lambda } = *model;
    free_var
        + 2.0 * k * k * r_c * r_c * lambda * t
        + hbar * hbar * lambda * t.powi(3) / (6.0 * r_c * r_c * (1.0 + k).powi(2) * mass * mass)
}

/// First and second moments of the averaged state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments2 {
    pub mean_x: f64,
    pub mean_p: f64,
    pub second_x: f64,
    /// `⟨XP + PX⟩/2`.
    pub sym_xp: f64,
    pub second_p: f64,
}

impl Moments2 {
    pub fn of_state(s: &GaussianState, model: &Model) -> Self {
        let o = s.observables(model);
        Self {
            mean_x: o.mean_x,
            mean_p: o.mean_p,
            second_x: o.var_x + o.mean_x * o.mean_x,
            sym_xp: o.cov_xp + o.mean_x * o.mean_p,
            second_p: o.var_p + o.mean_p * o.mean_p,
        }
    }

    pub fn var_x(&self) -> f64 {
        self.second_x - self.mean_x * self.mean_x
    }

    pub fn var_p(&self) -> f64 {
        self.second_p - self.mean_p * self.mean_p
    }

    pub fn energy(&self, model: &Model) -> f64 {
        self.second_p / (2.0 * model.mass)
    }
}

/// Exact moments at any `k`.
///
/// The moments up to second order obey a closed linear system:
/// `d⟨X⟩ = ⟨P⟩/M`, `d⟨P⟩ = -κ⟨P⟩`, `d⟨X²⟩ = 2⟨XP⟩_s/M + 2λk²r_c²`,
/// `d⟨XP⟩_s = ⟨P²⟩/M - κ⟨XP⟩_s`, `d⟨P²⟩ = -ξ⟨P²⟩ + λħ²/(2r_c²(1+k)²)`,
/// with `κ = 2kλ/(1+k)`. It is solved with a matrix exponential, so the
/// model should be dimensionless to keep the matrix well scaled.
pub fn exact_moments(s0: &GaussianState, t: f64, model: &Model) -> Moments2 {
    let m0 = Moments2::of_state(s0, model);
    let Model { hbar, mass, r_c, k, lambda } = *model;
    let kappa = model.momentum_damping();
    let xi = model.xi();
    let d = lambda * hbar * hbar / (2.0 * model.envelope_var());
    let mut a = SMatrix::<f64, 6, 6>::zeros();
    a[(0, 1)] = 1.0 / mass;
    a[(1, 1)] = -kappa;
    a[(2, 3)] = 2.0 / mass;
    a[(2, 5)] = 2.0 * lambda * k * k * r_c * r_c;
    a[(3, 4)] = 1.0 / mass;
    a[(3, 3)] = -kappa;
    a[(4, 4)] = -xi;
    a[(4, 5)] = d;
    let v0 = SVector::<f64, 6>::from([m0.mean_x, m0.mean_p, m0.second_x, m0.sym_xp, m0.second_p, 1.0]);
    let v = (a * t).exp() * v0;
    Moments2 { mean_x: v[0], mean_p: v[1], second_x: v[2], sym_xp: v[3], second_p: v[4] }
}

/// `Φ(ν, μ) = exp(-ν²r_c²k²/ħ² - μ²/(4r_c²(1+k)²))`, returned as `1 - Φ`
/// to keep precision near the origin.
fn one_minus_phi(nu: f64, mu: f64, model: &Model) -> f64 {
    let a = nu * model.r_c * model.k / model.hbar;
    -(-(a * a) - mu * mu / (4.0 * model.envelope_var())).exp_m1()
}

/// Characteristic function `⟨exp(i(νX + μP)/ħ)⟩` of a Gaussian state.
pub fn gaussian_chi(nu: f64, mu: f64, s: &GaussianState, model: &Model) -> Complex64 {
    let o = s.observables(model);
    let h = model.hbar;
    let re = -(nu * nu * o.var_x + 2.0 * nu * mu * o.cov_xp + mu * mu * o.var_p) / (2.0 * h * h);
    Complex64::new(re, (nu * o.mean_x + mu * o.mean_p) / h).exp()
}

/// Characteristic function of the averaged state in the small-`k` form
/// `χ₀(ν, μ + νt/M) exp(-λ∫₀ᵗ (1 - Φ(ν, μ + νu/M)) du)`.
pub fn characteristic_function(nu: f64, mu: f64, t: f64, s0: &GaussianState, model: &Model) -> Result<Complex64> {
    characteristic_function_tol(nu, mu, t, s0, model, 1e-10)
}

/// As [`characteristic_function`] with an explicit absolute tolerance on
/// the time integral.
pub fn characteristic_function_tol(
    nu: f64,
    mu: f64,
    t: f64,
    s0: &GaussianState,
    model: &Model,
    tol: f64,
) -> Result<Complex64> {
    let free = gaussian_chi(nu, mu + nu * t / model.mass, s0, model);
    let integral = quad::integrate(|u| one_minus_phi(nu, mu + nu * u / model.mass, model), 0.0, t, tol)?;
    Ok(free * (-model.lambda * integral).exp())
}

/// Moments recovered from `χ` by five-point central differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiMoments {
    pub mean_x: f64,
    pub second_x: f64,
    pub var_x: f64,
    pub mean_p: f64,
}

/// Differentiates `χ` at the origin with steps `h_nu`, `h_mu`.
pub fn chi_moments(t: f64, s0: &GaussianState, model: &Model, h_nu: f64, h_mu: f64) -> Result<ChiMoments> {
    let tol = 1e-15 * t.max(1.0);
    let chi = |nu: f64, mu: f64| characteristic_function_tol(nu, mu, t, s0, model, tol);
    let hb = model.hbar;
    let (xm2, xm1, x0, xp1, xp2) =
        (chi(-2.0 * h_nu, 0.0)?, chi(-h_nu, 0.0)?, chi(0.0, 0.0)?, chi(h_nu, 0.0)?, chi(2.0 * h_nu, 0.0)?);
    let d1 = (xm2 - 8.0 * xm1 + 8.0 * xp1 - xp2) / (12.0 * h_nu);
    let d2 = (-xm2 + 16.0 * xm1 - 30.0 * x0 + 16.0 * xp1 - xp2) / (12.0 * h_nu * h_nu);
    let (pm2, pm1, pp1, pp2) = (chi(0.0, -2.0 * h_mu)?, chi(0.0, -h_mu)?, chi(0.0, h_mu)?, chi(0.0, 2.0 * h_mu)?);
    let dp = (pm2 - 8.0 * pm1 + 8.0 * pp1 - pp2) / (12.0 * h_mu);
    let mean_x = (d1 * Complex64::new(0.0, -hb)).re;
    let second_x = -hb * hb * d2.re;
    Ok(ChiMoments { mean_x, second_x, var_x: second_x - mean_x * mean_x, mean_p: (dp * Complex64::new(0.0, -hb)).re })
}

/// Square root with the explicit branch rule
/// `√z = ζ√|z| (√(½ + |z_R|/(2|z|)) + i sgn(z_R z_I) √(½ - |z_R|/(2|z|)))`,
/// `ζ = 1` for `z_R > 0`, `i` for `z_R < 0 ≤ z_I`, `-i` for `z_R, z_I < 0`.
/// The smaller of the two bracketed roots is computed from the larger one
/// to avoid cancellation. On the imaginary axis it returns the principal
/// root.
pub fn branch_sqrt(z: Complex64) -> Complex64 {
    let modulus = z.norm();
    if modulus == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let root = modulus.sqrt();
    if z.re == 0.0 {
        let h = root * std::f64::consts::FRAC_1_SQRT_2;
        return Complex64::new(h, h.copysign(z.im));
    }
    let big = (0.5 + z.re.abs() / (2.0 * modulus)).sqrt();
    let small = z.im.abs() / (2.0 * modulus * big);
    let sgn = if z.re * z.im > 0.0 {
        1.0
    } else if z.re * z.im < 0.0 {
        -1.0
    } else {
        0.0
    };
    let zeta = if z.re > 0.0 {
        Complex64::new(1.0, 0.0)
    } else if z.im >= 0.0 {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(0.0, -1.0)
    };
    zeta * root * Complex64::new(big, sgn * small)
}

/// Stationary widths for equally spaced jumps at rate `λ` of `model`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticVariances {
    /// Post-jump width `γ_eq`, in units of `r_c²`.
    pub gamma_eq: Complex64,
    pub var_x: f64,
    pub var_p: f64,
    /// Position variance from the cancellation-safe closed form.
    pub var_x_closed: f64,
    /// Momentum variance from the cancellation-safe closed form.
    pub var_p_closed: f64,
    /// `|𝒢(γ + iε) - γ| / |γ|`.
    pub residual: f64,
    /// Limit of the iterated map started from `γ = r_c²`, units of `r_c²`.
    pub gamma_iterated: Complex64,
}

/// `γ ↦ 𝒢(γ + iε) = R(γ + iε)/(γ + s²R + iε)` as a Möbius matrix, all in
/// units of `r_c²`.
fn cycle_map(model: &Model, eps: f64) -> [[Complex64; 2]; 2] {
    let r = (1.0 + model.k).powi(2);
    let s2 = model.contraction().powi(2);
    let one = Complex64::new(1.0, 0.0);
    [[one * r, Complex64::new(0.0, eps * r)], [one, Complex64::new(s2 * r, eps)]]
}

fn apply_cycle(model: &Model, eps: f64, g: Complex64) -> Complex64 {
    let m = cycle_map(model, eps);
    (m[0][0] * g + m[0][1]) / (m[1][0] * g + m[1][1])
}

/// Iterates the cycle `2^200` times by repeated squaring of its matrix.
pub fn iterate_cycle(model: &Model, eps: f64, start: Complex64) -> Complex64 {
    let mut p = cycle_map(model, eps);
    for _ in 0..200 {
        let q = [
            [p[0][0] * p[0][0] + p[0][1] * p[1][0], p[0][0] * p[0][1] + p[0][1] * p[1][1]],
            [p[1][0] * p[0][0] + p[1][1] * p[1][0], p[1][0] * p[0][1] + p[1][1] * p[1][1]],
        ];
        let scale = q.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        p = q.map(|row| row.map(|z| z / scale));
    }
    (p[0][0] * start + p[0][1]) / (p[1][0] * start + p[1][1])
}

/// Position and momentum variance of the stationary cycle, where
/// `γ_eq = (γ_thr - iε + √((γ_thr - iε)² + 4iεR))/2`, `ε = ħ/(Mλ)`.
pub fn asymptotic_variances(model: &Model) -> Result<AsymptoticVariances> {
    let r2 = model.r_c * model.r_c;
    let eps = model.epsilon() / r2;
    let g = 4.0 * model.k;
    let r = (1.0 + model.k).powi(2);
    let b = Complex64::new(g, -eps);
    let disc = Complex64::new(g * g - eps * eps, 2.0 * eps * (2.0 * r - g));
    let root = branch_sqrt(disc);
    let gamma_eq = if (b + root).norm() >= (b - root).norm() {
        (b + root) / 2.0
    } else {
        Complex64::new(0.0, -2.0 * eps * r) / (b - root)
    };
    let residual = (apply_cycle(model, eps, gamma_eq) - gamma_eq).norm() / gamma_eq.norm();
    if !(residual <= FIXED_POINT_TOL) {
        return Err(Error::FixedPoint { residual, tolerance: FIXED_POINT_TOL });
    }
    let gamma_iterated = iterate_cycle(model, eps, Complex64::new(1.0, 0.0));
    let (var_x_closed, var_p_closed) = closed_form_variances(g, eps, r);
    let hb2 = model.hbar * model.hbar;
    Ok(AsymptoticVariances {
        gamma_eq,
        var_x: width_variance(gamma_eq) * r2,
        var_p: hb2 / (2.0 * gamma_eq.re * r2),
        var_x_closed: var_x_closed * r2,
        var_p_closed: hb2 / (var_p_closed * r2),
        residual,
        gamma_iterated,
    })
}

/// Returns `(var_x / r_c², ħ² r_c⁻² / var_p)` from the closed forms with
/// `χ = √((g²/ε² + 1)² + 16R(R - g)/ε²)`, rearranged so that `χ - g²/ε² + 1`
/// and `χ + g²/ε² - 1` never subtract nearly equal numbers.
pub fn closed_form_variances(g: f64, eps: f64, r: f64) -> (f64, f64) {
    let q = g / eps;
    let u = q * q + 1.0;
    let w = 16.0 * r * (r - g) / (eps * eps);
    let chi = u.hypot(w.sqrt());
    let excess = w / (chi + u);
    let var_x = r / (1.0 + ((excess + 2.0) / 2.0).sqrt());
    let inv_var_p = g + eps * ((excess + 2.0 * q * q) / 2.0).sqrt();
    (var_x, inv_var_p)
}

/// Drifts `d⟨P⟩/dt` and `d⟨P²/2M⟩/dt` for a Gaussian state by quadrature
/// over the momentum transfer `Q` and the state's momentum density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumTransfer {
    pub dp_dt: f64,
    pub dh_dt: f64,
    /// Closed forms `-κ⟨P⟩` and `ħ²λ/(4Mr_c²(1+k)²) - ξ⟨H⟩`.
    pub dp_dt_closed: f64,
    pub dh_dt_closed: f64,
}

pub fn momentum_transfer_checks(s: &GaussianState, model: &Model) -> Result<MomentumTransfer> {
    let Model { hbar, mass, r_c, k, lambda } = *model;
    let o = s.observables(model);
    let sp = o.var_p.sqrt();
    let q_width = hbar / (r_c * (1.0 + k) * std::f64::consts::SQRT_2);
    let pref = lambda * r_c * (1.0 + k) / (PI.sqrt() * hbar);
    let rho = |p: f64| (-(p - o.mean_p).powi(2) / (2.0 * o.var_p)).exp() / (2.0 * PI * o.var_p).sqrt();
    let failure = Cell::new(None);
    let drift = |f: &dyn Fn(f64, f64) -> f64| -> Result<f64> {
        let outer = quad::integrate_rel(
            |p| {
                let centre = -2.0 * k * p / (1.0 + k);
                let inner = quad::integrate_rel(
                    |q| {
                        let a = r_c * ((1.0 + k) * q + 2.0 * k * p) / hbar;
                        (-a * a).exp() * f(p, q)
                    },
                    centre - 12.0 * q_width,
                    centre + 12.0 * q_width,
                    1e-10,
                    f64::MIN_POSITIVE,
                );
                match inner {
                    Ok(v) => pref * v * rho(p),
                    Err(e) => {
                        failure.set(Some(e.to_string()));
                        0.0
                    }
                }
            },
            o.mean_p - 12.0 * sp,
            o.mean_p + 12.0 * sp,
            1e-9,
            f64::MIN_POSITIVE,
        )?;
        if let Some(msg) = failure.take() {
            return Err(Error::InvalidInput(format!("inner momentum-transfer integral: {msg}")));
        }
        Ok(outer)
    };
    let dp_dt = drift(&|_, q| q)?;
    let dh_dt = drift(&|p, q| (2.0 * p * q + q * q) / (2.0 * mass))?;
    Ok(MomentumTransfer {
        dp_dt,
        dh_dt,
        dp_dt_closed: -model.momentum_damping() * o.mean_p,
        dh_dt_closed: model.heating_rate() - model.xi() * o.kinetic_energy,
    })
}

/// Parameter identification with a thermal gas of scattering particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionalCorrespondence {
    /// Thermal de Broglie wavelength `4√π r_c`, m.
    pub lambda_th: f64,
    /// Most probable gas velocity, m/s.
    pub v_mp: f64,
    /// Rate in terms of the gas coupling.
    pub rate_formula: String,
}

pub fn collisional_correspondence(p: &ModelParams) -> CollisionalCorrespondence {
    CollisionalCorrespondence {
        lambda_th: 4.0 * PI.sqrt() * p.r_c,
        v_mp: p.v_eta,
        rate_formula: "lambda = 16*pi*K^2*n_gas*m/hbar^3".to_owned(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_sqrt_squares_back() {
        for (re, im) in [(3.0, 4.0), (-3.0, 4.0), (-3.0, -4.0), (3.0, -4.0), (0.0, 2.0), (0.0, -2.0), (-1.0, 0.0)] {
            let z = Complex64::new(re, im);
            let r = branch_sqrt(z);
            assert!((r * r - z).norm() < 1e-14 * z.norm(), "{z}");
            assert!((r - z.sqrt()).norm() < 1e-14 * z.norm().sqrt(), "{z}");
        }
    }

    #[test]
    fn mean_energy_limits() {
        let m = Model::dimensionless(0.05, 1.0).unwrap();
        assert_eq!(mean_energy(3.0, 0.0, &m), 3.0);
        assert!((mean_energy(3.0, 1e4, &m) - m.h_as()).abs() < 1e-12 * m.h_as());
    }

    #[test]
    fn momentum_e_folding() {
        let m = Model::dimensionless(0.05, 1.0).unwrap();
        let t = (1.0 + m.k) / (2.0 * m.k * m.lambda);
        assert!((mean_momentum(2.0, t, &m) - 2.0 / std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn chi_is_normalized_and_hermitian() {
        let m = Model::dimensionless(0.05, 1.0).unwrap();
        let s = GaussianState::new(Complex64::new(0.3, 0.1), 0.7, Complex64::new(1.2, 0.4)).unwrap();
        let one = characteristic_function(0.0, 0.0, 3.0, &s, &m).unwrap();
        assert!((one - 1.0).norm() < 1e-15);
        let a = characteristic_function(0.4, -0.3, 3.0, &s, &m).unwrap();
        let b = characteristic_function(-0.4, 0.3, 3.0, &s, &m).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn exact_moments_reduce_to_free_flow() {
        let m = Model::dimensionless(0.0, 1.0).unwrap().with_lambda(1e-300).unwrap();
        let s = GaussianState::real(0.5, 1.0, 2.0).unwrap();
        let e = exact_moments(&s, 2.0, &m);
        assert!((e.mean_x - 2.5).abs() < 1e-12);
        assert!((e.var_x() - free_variance(&s, 2.0, &m)).abs() < 1e-12);
    }
}
