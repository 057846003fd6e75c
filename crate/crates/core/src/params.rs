// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Physical parameters, presets, and the dimensionless reduction.
//!
//! The dynamics depend on two dimensionless groups only: the dissipation
//! parameter `k = ħ/(2 M v_η r_c)` and `eps_hat = ħ/(M λ r_c²)`. All
//! simulation code works with a [`Model`] expressed in units where
//! `ħ = r_c = λ = 1`, so the mass becomes `1/eps_hat`. SI values appear only
//! at the input and output boundaries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::extended_f64;

/// Reduced Planck constant (CODATA 2018), J·s.
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant (exact SI), J/K.
pub const K_BOLTZMANN: f64 = 1.380649e-23;
/// Electron volt in joules (exact SI).
pub const ELECTRON_VOLT: f64 = 1.602176634e-19;
/// Default localization width, m.
pub const DEFAULT_R_C: f64 = 1e-7;
/// Default jump rate for a single nucleon, 1/s.
pub const DEFAULT_LAMBDA: f64 = 1e-16;
/// Default dissipation velocity `1e31 · ħ/r_c` (per kg) at the default `r_c`.
/// It gives `k = 5e-32 kg / M`.
pub const DEFAULT_V_ETA: f64 = 1.054571817e4;
/// Proton mass, kg.
pub const PROTON_MASS: f64 = 1.67262192e-27;

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    /// Original rate `λ = 1e-16 s⁻¹` with a `1e-27 kg` particle.
    #[serde(rename = "grw1986")]
    Grw1986,
    /// Enhanced rate `λ = 2.2e-8 s⁻¹` with a `1e-27 kg` particle.
    #[serde(rename = "adler2007")]
    Adler2007,
    /// A single proton at `λ = 1e-16 s⁻¹`.
    #[serde(rename = "nucleon")]
    Nucleon,
    /// Centre of mass of a 1 g rigid body, `λ_macro = 1e7 s⁻¹`.
    #[serde(rename = "macro_1g")]
    Macro1g,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Grw1986, Preset::Adler2007, Preset::Nucleon, Preset::Macro1g];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Grw1986 => "grw1986",
            Preset::Adler2007 => "adler2007",
            Preset::Nucleon => "nucleon",
            Preset::Macro1g => "macro_1g",
        }
    }

    pub fn params(self) -> ModelParams {
        let (lambda_rate, mass) = match self {
            Preset::Grw1986 => (DEFAULT_LAMBDA, 1e-27),
            Preset::Adler2007 => (2.2e-8, 1e-27),
            Preset::Nucleon => (DEFAULT_LAMBDA, PROTON_MASS),
            Preset::Macro1g => (1e7, 1e-3),
        };
        ModelParams { lambda_rate, mass, ..ModelParams::default() }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s.trim()).ok_or_else(|| Error::UnknownPreset(s.trim().to_owned()))
    }
}

/// Physical parameters in SI units.
///
/// `v_eta = +∞` selects the non-dissipative limit (`k = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda_rate: f64,
    pub r_c: f64,
    #[serde(with = "extended_f64")]
    pub v_eta: f64,
    pub mass: f64,
    pub hbar: f64,
    pub k_boltzmann: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            lambda_rate: DEFAULT_LAMBDA,
            r_c: DEFAULT_R_C,
            v_eta: DEFAULT_V_ETA,
            mass: 1e-27,
            hbar: HBAR,
            k_boltzmann: K_BOLTZMANN,
        }
    }
}

/// Quantities derived from [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub k: f64,
    /// Threshold width parameter `4 k r_c²`, m².
    pub gamma_thr: f64,
    /// Energy relaxation rate, 1/s.
    pub xi: f64,
    /// Asymptotic mean energy, J.
    #[serde(with = "extended_f64")]
    pub h_as: f64,
    /// Noise temperature, K.
    #[serde(with = "extended_f64")]
    pub temperature: f64,
    /// `ħ/(M λ)`, m².
    pub epsilon: f64,
    /// `ε / r_c²`.
    pub eps_hat: f64,
}

impl ModelParams {
    /// Builds SI parameters that realize the given dimensionless pair at the
    /// default `r_c` and `λ = 1 s⁻¹`.
    pub fn from_dimensionless(k: f64, eps_hat: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&k) {
            return Err(Error::InvalidParams(format!("k = {k} outside [0, 1)")));
        }
        if !(eps_hat > 0.0 && eps_hat.is_finite()) {
            return Err(Error::InvalidParams(format!("eps_hat = {eps_hat} must be positive")));
        }
        let r_c = DEFAULT_R_C;
        let lambda_rate = 1.0;
        let mass = HBAR / (eps_hat * lambda_rate * r_c * r_c);
        let v_eta = if k == 0.0 { f64::INFINITY } else { HBAR / (2.0 * mass * k * r_c) };
        let p = ModelParams { lambda_rate, r_c, v_eta, mass, ..ModelParams::default() };
        p.validate()?;
        Ok(p)
    }

    /// Dissipation parameter `k = ħ/(2 M v_η r_c)`.
    pub fn k(&self) -> f64 {
        self.hbar / (2.0 * self.mass * self.v_eta * self.r_c)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} = {v} must be positive and finite")))
            }
        };
        positive("lambda_rate", self.lambda_rate)?;
        positive("r_c", self.r_c)?;
        positive("mass", self.mass)?;
        positive("hbar", self.hbar)?;
        positive("k_boltzmann", self.k_boltzmann)?;
        if !(self.v_eta > 0.0) {
            return Err(Error::InvalidParams(format!("v_eta = {} must be positive", self.v_eta)));
        }
        let k = self.k();
        if !(k < 1.0) {
            return Err(Error::InvalidParams(format!("k = {k:e} must be below 1")));
        }
        Ok(())
    }

    pub fn derive(&self) -> Result<DerivedParams> {
        self.validate()?;
        let k = self.k();
        let r2 = self.r_c * self.r_c;
        let (h_as, temperature) = if k > 0.0 {
            let h = self.hbar * self.hbar / (16.0 * self.mass * r2 * k);
            (h, 2.0 * h / self.k_boltzmann)
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        let epsilon = self.hbar / (self.mass * self.lambda_rate);
        Ok(DerivedParams {
            k,
            gamma_thr: 4.0 * k * r2,
            xi: 4.0 * self.lambda_rate * k / ((1.0 + k) * (1.0 + k)),
            h_as,
            temperature,
            epsilon,
            eps_hat: epsilon / r2,
        })
    }

    /// The model in SI units.
    pub fn model_si(&self) -> Result<Model> {
        self.validate()?;
        Model::new(self.hbar, self.mass, self.r_c, self.k(), self.lambda_rate)
    }

    /// The model in units `ħ = r_c = λ = 1`.
    pub fn model(&self) -> Result<Model> {
        let d = self.derive()?;
        Model::dimensionless(d.k, d.eps_hat)
    }

    pub fn units(&self) -> UnitSystem {
        UnitSystem::nondimensional(self)
    }

    /// Parses `key = value` lines. Keys: `preset`, `lambda_rate`, `r_c`,
    /// `v_eta`, `mass`. A preset provides the base values; explicit keys
    /// override it regardless of line order. `#` starts a comment.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut preset = None;
        let mut overrides: Vec<(usize, &str, f64)> = Vec::new();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                msg: format!("expected `key = value`, found `{line}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(Error::Config { line: line_no, msg: format!("duplicate key `{key}`") });
            }
            seen.push(key);
            match key {
                "preset" => {
                    preset =
                        Some(value.parse::<Preset>().map_err(|e| Error::Config { line: line_no, msg: e.to_string() })?)
                }
                "lambda_rate" | "r_c" | "v_eta" | "mass" => {
                    let v = value
                        .parse::<f64>()
                        .map_err(|_| Error::Config { line: line_no, msg: format!("`{value}` is not a number") })?;
                    overrides.push((line_no, key, v));
                }
                other => return Err(Error::Config { line: line_no, msg: format!("unknown key `{other}`") }),
            }
        }
        let mut p = preset.map(Preset::params).unwrap_or_default();
        for (_, key, v) in overrides {
            match key {
                "lambda_rate" => p.lambda_rate = v,
                "r_c" => p.r_c = v,
                "v_eta" => p.v_eta = v,
                "mass" => p.mass = v,
                _ => unreachable!("keys filtered above"),
            }
        }
        p.validate()?;
        Ok(p)
    }
}

/// Model constants in a consistent unit system (SI or `ħ = r_c = λ = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub hbar: f64,
    pub mass: f64,
    pub r_c: f64,
    pub k: f64,
    pub lambda: f64,
}

impl Model {
    pub fn new(hbar: f64, mass: f64, r_c: f64, k: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("r_c", r_c), ("lambda", lambda)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} = {v} must be positive and finite")));
            }
        }
        if !(0.0..1.0).contains(&k) {
            return Err(Error::InvalidParams(format!("k = {k} outside [0, 1)")));
        }
        Ok(Self { hbar, mass, r_c, k, lambda })
    }

    /// `ħ = r_c = λ = 1`, `M = 1/eps_hat`.
    pub fn dimensionless(k: f64, eps_hat: f64) -> Result<Self> {
        Self::new(1.0, 1.0 / eps_hat, 1.0, k, 1.0)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(self.hbar, self.mass, self.r_c, self.k, lambda)
    }

    /// Momentum contraction per jump, `(1-k)/(1+k)`.
    pub fn contraction(&self) -> f64 {
        (1.0 - self.k) / (1.0 + self.k)
    }

    /// Squared width of the localization envelope, `r_c²(1+k)²`.
    pub fn envelope_var(&self) -> f64 {
        let w = self.r_c * (1.0 + self.k);
        w * w
    }

    pub fn gamma_thr(&self) -> f64 {
        4.0 * self.k * self.r_c * self.r_c
    }

    /// Exponential damping rate of the mean momentum, `2kλ/(1+k)`.
    pub fn momentum_damping(&self) -> f64 {
        2.0 * self.k * self.lambda / (1.0 + self.k)
    }

    /// Energy relaxation rate `4λk/(1+k)²`.
    pub fn xi(&self) -> f64 {
        4.0 * self.lambda * self.k / ((1.0 + self.k) * (1.0 + self.k))
    }

    /// Energy injection rate `ħ²λ/(4 M r_c² (1+k)²)`; at `k = 0` this is the
    /// linear heating rate of the non-dissipative model.
    pub fn heating_rate(&self) -> f64 {
        self.hbar * self.hbar * self.lambda / (4.0 * self.mass * self.envelope_var())
    }

    /// Asymptotic mean energy; infinite at `k = 0`.
    pub fn h_as(&self) -> f64 {
        if self.k > 0.0 {
            self.hbar * self.hbar / (16.0 * self.mass * self.r_c * self.r_c * self.k)
        } else {
            f64::INFINITY
        }
    }

    /// `ħ/(M λ)`.
    pub fn epsilon(&self) -> f64 {
        self.hbar / (self.mass * self.lambda)
    }
}

/// Kinds of quantity handled by [`UnitSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Length,
    Time,
    Momentum,
    Energy,
    Variance,
    MomentumVariance,
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "length" => Quantity::Length,
            "time" => Quantity::Time,
            "momentum" => Quantity::Momentum,
            "energy" => Quantity::Energy,
            "variance" => Quantity::Variance,
            "momentum_variance" => Quantity::MomentumVariance,
            other => return Err(Error::UnknownQuantity(other.to_owned())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitMode {
    Si,
    Nondimensional,
}

/// Scales between SI and dimensionless values.
///
/// Energies are scaled by `ħ²/(M r_c²)`. The dimensionless [`Model`] uses
/// `ħλ` as its energy unit instead, because its mass is `1/eps_hat`; use
/// [`UnitSystem::model_energy_scale`] to convert simulation output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub mode: UnitMode,
    pub length_scale: f64,
    pub time_scale: f64,
    pub momentum_scale: f64,
    pub energy_scale: f64,
    hbar_lambda: f64,
}

impl UnitSystem {
    pub fn nondimensional(p: &ModelParams) -> Self {
        Self {
            mode: UnitMode::Nondimensional,
            length_scale: p.r_c,
            time_scale: 1.0 / p.lambda_rate,
            momentum_scale: p.hbar / p.r_c,
            energy_scale: p.hbar * p.hbar / (p.mass * p.r_c * p.r_c),
            hbar_lambda: p.hbar * p.lambda_rate,
        }
    }

    /// All scales equal to one.
    pub fn si() -> Self {
        Self {
            mode: UnitMode::Si,
            length_scale: 1.0,
            time_scale: 1.0,
            momentum_scale: 1.0,
            energy_scale: 1.0,
            hbar_lambda: 1.0,
        }
    }

    pub fn scale(&self, kind: Quantity) -> f64 {
        match kind {
            Quantity::Length => self.length_scale,
            Quantity::Time => self.time_scale,
            Quantity::Momentum => self.momentum_scale,
            Quantity::Energy => self.energy_scale,
            Quantity::Variance => self.length_scale * self.length_scale,
            Quantity::MomentumVariance => self.momentum_scale * self.momentum_scale,
        }
    }

    /// Energy unit of the dimensionless [`Model`], `ħλ`.
    pub fn model_energy_scale(&self) -> f64 {
        self.hbar_lambda
    }

    pub fn nondimensionalize(&self, value: f64, kind: Quantity) -> f64 {
        value / self.scale(kind)
    }

    pub fn dimensionalize(&self, value: f64, kind: Quantity) -> f64 {
        value * self.scale(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn k_for_reference_masses() {
        let micro = Preset::Grw1986.params();
        assert!(rel(micro.k(), 5e-5) < 1e-14);
        let macro_ = ModelParams { mass: 1e-3, ..micro };
        assert!(rel(macro_.k(), 5e-29) < 1e-14);
    }

    #[test]
    fn grw_limit() {
        let p = ModelParams { v_eta: f64::INFINITY, ..ModelParams::default() };
        let d = p.derive().unwrap();
        assert_eq!(d.k, 0.0);
        assert_eq!(d.xi, 0.0);
        assert_eq!(d.gamma_thr, 0.0);
        assert!(d.h_as.is_infinite() && d.temperature.is_infinite());
    }

    #[test]
    fn derived_identities() {
        let p = Preset::Macro1g.params();
        let d = p.derive().unwrap();
        assert_eq!(d.gamma_thr, 4.0 * d.k * p.r_c * p.r_c);
        assert!(rel(d.h_as * 16.0 * p.mass * p.r_c * p.r_c * d.k, p.hbar * p.hbar) < 1e-14);
        assert!(d.xi / p.lambda_rate < 1.0);
        let t_direct = p.hbar * p.v_eta / (4.0 * p.k_boltzmann * p.r_c);
        assert!(rel(d.temperature, t_direct) < 1e-12);
    }

    #[test]
    fn rejects_bad_params() {
        let bad = [
            ModelParams { lambda_rate: 0.0, ..Default::default() },
            ModelParams { r_c: -1.0, ..Default::default() },
            ModelParams { mass: 0.0, ..Default::default() },
            ModelParams { v_eta: 1e-30, ..Default::default() },
        ];
        for p in bad {
            assert!(p.derive().is_err(), "{p:?}");
        }
    }

    #[test]
    fn config_parsing() {
        let p = ModelParams::from_config_str("# macro\nmass = 2e-3\npreset = macro_1g\n").unwrap();
        assert_eq!(p.mass, 2e-3);
        assert_eq!(p.lambda_rate, 1e7);
        let p = ModelParams::from_config_str("v_eta = inf").unwrap();
        assert_eq!(p.k(), 0.0);
        assert!(matches!(ModelParams::from_config_str("foo = 1"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(ModelParams::from_config_str("mass = 1\nmass = 2"), Err(Error::Config { line: 2, .. })));
        assert!(matches!(ModelParams::from_config_str("preset = nope"), Err(Error::Config { .. })));
    }

    #[test]
    fn unit_round_trip() {
        let p = Preset::Nucleon.params();
        let u = p.units();
        assert_eq!(u.nondimensionalize(p.r_c, Quantity::Length), 1.0);
        assert_eq!(u.nondimensionalize(1.0 / p.lambda_rate, Quantity::Time), 1.0);
        assert!(rel(u.nondimensionalize(1e6 * p.r_c * p.r_c, Quantity::Variance), 1e6) < 1e-15);
        assert!("speed".parse::<Quantity>().is_err());
    }

    #[test]
    fn dimensionless_model_matches_si() {
        let p = Preset::Adler2007.params();
        let si = p.model_si().unwrap();
        let nd = p.model().unwrap();
        let u = p.units();
        assert!(rel(nd.epsilon(), si.epsilon() / (p.r_c * p.r_c)) < 1e-14);
        assert!(rel(nd.h_as() * u.model_energy_scale(), si.h_as()) < 1e-12);
        assert!(rel(nd.xi() / u.time_scale, si.xi()) < 1e-14);
    }

    #[test]
    fn from_dimensionless_round_trip() {
        let p = ModelParams::from_dimensionless(0.05, 1.0).unwrap();
        let d = p.derive().unwrap();
        assert!(rel(d.k, 0.05) < 1e-14);
        assert!(rel(d.eps_hat, 1.0) < 1e-14);
        assert_eq!(ModelParams::from_dimensionless(0.0, 2.0).unwrap().k(), 0.0);
    }
}
