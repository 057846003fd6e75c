// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Wavefunctions sampled on a uniform one-dimensional grid.
//!
//! The localization jump acts as
//! `(L_y ψ)(X) = (πR)^(-1/4) exp(-(X-y)²/(2R)) ψ(sX + (1-s)y)` with
//! `R = r_c²(1+k)²` and `s = (1-k)/(1+k)`. For `k > 0` the argument of `ψ`
//! falls between grid points and is interpolated.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, GridFlag, Result};
use crate::gaussian::GaussianState;
use crate::params::Model;
use crate::rng::StreamRng;

/// Spectral mass allowed in the outer eighth of the momentum band.
const ALIASING_TOL: f64 = 1e-10;
/// Probability allowed within the outer 1/32 of the grid after free evolution.
const BOUNDARY_TOL: f64 = 1e-8;
/// Truncated probability tolerated when the jump argument is rescaled.
const TRUNCATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Cubic,
    /// Debug mode with `O(dx²)` error.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridWavefunction {
    pub x0: f64,
    pub dx: f64,
    pub amplitudes: Vec<Complex64>,
}

/// Outcome of a grid jump.
#[derive(Debug, Clone)]
pub struct GridJump {
    pub psi: GridWavefunction,
    /// Squared norm before renormalization, i.e. `p(y)`.
    pub norm_sqr: f64,
    /// Part of `p(y)` lost because `ψ` is known only on the grid.
    pub truncated: f64,
}

impl GridWavefunction {
    pub fn new(x0: f64, dx: f64, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = amplitudes.len();
        if n < 4 || !n.is_power_of_two() {
            return Err(GridFlag::NotPowerOfTwo(n).into());
        }
        if !(dx > 0.0 && dx.is_finite() && x0.is_finite()) {
            return Err(Error::InvalidInput(format!("grid spacing {dx} and origin {x0} must be finite, dx > 0")));
        }
        Ok(Self { x0, dx, amplitudes })
    }

    /// Builds a grid from samples of `f`.
    pub fn from_fn(x0: f64, dx: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(x0, dx, (0..n).map(|j| f(x0 + j as f64 * dx)).collect())
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.n() - 1)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dx
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::InvalidInput("cannot normalize a null wavefunction".into()));
        }
        let f = 1.0 / n2.sqrt();
        self.amplitudes.iter_mut().for_each(|a| *a *= f);
        Ok(self)
    }

    /// `⟨self|other⟩` on a shared grid.
    pub fn inner(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.n(), other.n());
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.dx
    }

    /// `min_φ ‖self - e^{iφ} other‖`.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let ip = self.inner(other);
        let phase = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
        let d2: f64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a * phase - b).norm_sqr()).sum();
        (d2 * self.dx).sqrt()
    }

    /// Probability on the points where `pred(x)` holds.
    pub fn mass_where(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.amplitudes.iter().enumerate().filter(|(j, _)| pred(self.x(*j))).map(|(_, a)| a.norm_sqr()).sum::<f64>()
            * self.dx
    }

    /// `(⟨X⟩, Var X)` of the normalized density.
    pub fn position_moments(&self) -> (f64, f64) {
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (j, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            let x = self.x(j);
            w += p;
            m1 += p * x;
            m2 += p * x * x;
        }
        let mean = m1 / w;
        (mean, m2 / w - mean * mean)
    }

    /// Angular wavenumbers in FFT order.
    fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n();
        let dk = 2.0 * PI / (n as f64 * self.dx);
        (0..n).map(|j| if j < n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk }).collect()
    }

    fn spectrum(&self) -> Vec<Complex64> {
        let mut buf = self.amplitudes.clone();
        FftPlanner::new().plan_fft_forward(self.n()).process(&mut buf);
        buf
    }

    /// `(⟨P⟩, Var P)` from the discrete spectrum.
    pub fn momentum_moments(&self, hbar: f64) -> (f64, f64) {
        let spec = self.spectrum();
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (a, kk) in spec.iter().zip(self.wavenumbers()) {
            let p = a.norm_sqr();
            let q = hbar * kk;
            w += p;
            m1 += p * q;
            m2 += p * q * q;
        }
        let mean = m1 / w;
        (mean, m2 / w - mean * mean)
    }

    /// Fraction of spectral power in the outer eighth of the band.
    pub fn nyquist_mass(&self) -> f64 {
        let spec = self.spectrum();
        let n = self.n();
        let (lo, hi) = (n / 2 - n / 16, n / 2 + n / 16);
        let total: f64 = spec.iter().map(|a| a.norm_sqr()).sum();
        let edge: f64 = spec[lo..hi].iter().map(|a| a.norm_sqr()).sum();
        edge / total
    }

    /// Probability within the outer 1/32 of the grid on either side.
    pub fn boundary_mass(&self) -> f64 {
        let n = self.n();
        let w = (n / 32).max(1);
        let (lo, hi) = (self.x(w), self.x(n - 1 - w));
        self.mass_where(|x| x < lo || x > hi) / self.norm_sqr()
    }

    /// `ψ(x)` by interpolation, zero outside the grid.
    pub fn interpolate(&self, x: f64, mode: Interpolation) -> Complex64 {
        let u = (x - self.x0) / self.dx;
        let i = u.floor();
        let t = u - i;
        let i = i as i64;
        let at = |j: i64| {
            if j >= 0 && (j as usize) < self.n() {
                self.amplitudes[j as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        match mode {
            Interpolation::Linear => at(i) * (1.0 - t) + at(i + 1) * t,
            Interpolation::Cubic => {
                let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
                let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
                let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
                let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
                at(i - 1) * w0 + at(i) * w1 + at(i + 1) * w2 + at(i + 2) * w3
            }
        }
    }

    /// Writes `x,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,re,im")?;
        for (j, a) in self.amplitudes.iter().enumerate() {
            writeln!(out, "{:e},{:e},{:e}", self.x(j), a.re, a.im)?;
        }
        Ok(())
    }

    /// Reads `x,re,im` rows written by [`GridWavefunction::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut amps = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            if idx == 0 && line.trim_start().starts_with('x') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::InvalidInput(format!("line {}: bad number `{s}`", idx + 1)))
            };
            if fields.len() != 3 {
                return Err(Error::InvalidInput(format!("line {}: expected 3 columns", idx + 1)));
            }
            xs.push(parse(fields[0])?);
            amps.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidInput("need at least two grid points".into()));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        for (j, x) in xs.iter().enumerate() {
            if ((xs[0] + j as f64 * dx) - x).abs() > 1e-9 * dx.abs() * xs.len() as f64 {
                return Err(Error::InvalidInput("grid is not uniform".into()));
            }
        }
        Self::new(xs[0], dx, amps)
    }
}

/// Envelope `(πR)^(-1/4) exp(-(X-y)²/(2R))`.
fn envelope(x: f64, y: f64, r: f64) -> f64 {
    let d = x - y;
    (PI * r).powf(-0.25) * (-d * d / (2.0 * r)).exp()
}

/// Part of `p(y)` carried by grid points outside the image of the rescaled
/// argument; `ψ` is unknown there after the jump.
fn truncated_mass(psi: &GridWavefunction, y: f64, model: &Model) -> f64 {
    let s = model.contraction();
    if s == 1.0 {
        return 0.0;
    }
    let lo = s * psi.x0 + (1.0 - s) * y;
    let hi = s * psi.x_max() + (1.0 - s) * y;
    let v = s * s * model.envelope_var();
    let pref = 1.0 / (PI * v).sqrt();
    psi.amplitudes
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            let x = psi.x(*j);
            x < lo || x > hi
        })
        .map(|(j, a)| {
            let d = psi.x(j) - y;
            pref * (-d * d / v).exp() * a.norm_sqr()
        })
        .sum::<f64>()
        * psi.dx
}

fn jump_amplitudes(psi: &GridWavefunction, y: f64, model: &Model, mode: Interpolation) -> Vec<Complex64> {
    let s = model.contraction();
    let r = model.envelope_var();
    if s == 1.0 {
        return psi.amplitudes.iter().enumerate().map(|(j, a)| a * envelope(psi.x(j), y, r)).collect();
    }
    (0..psi.n())
        .map(|j| {
            let x = psi.x(j);
            psi.interpolate(s * x + (1.0 - s) * y, mode) * envelope(x, y, r)
        })
        .collect()
}

/// `p(y) = ‖L_y ψ‖²` together with the truncated part.
pub fn jump_norm_sqr(psi: &GridWavefunction, y: f64, model: &Model, mode: Interpolation) -> (f64, f64) {
    let amps = jump_amplitudes(psi, y, model, mode);
    let n2 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * psi.dx;
    (n2, truncated_mass(psi, y, model))
}

/// Applies `L_y` and renormalizes. Flags truncation above `1e-10` of `p(y)`.
pub fn apply_jump_grid(psi: &GridWavefunction, y: f64, model: &Model, mode: Interpolation) -> Result<GridJump> {
    let amps = jump_amplitudes(psi, y, model, mode);
    let out = GridWavefunction { x0: psi.x0, dx: psi.dx, amplitudes: amps };
    let norm_sqr = out.norm_sqr();
    let truncated = truncated_mass(psi, y, model);
    if truncated > TRUNCATION_TOL * (norm_sqr + truncated) {
        return Err(GridFlag::Truncation { mass: truncated / (norm_sqr + truncated) }.into());
    }
    Ok(GridJump { psi: out.normalized()?, norm_sqr, truncated })
}

/// `p(y)` at each point of a sorted `ys`. Errors when the trapezoidal mass
/// falls short of one by more than `1e-3`.
pub fn jump_density_grid(psi: &GridWavefunction, ys: &[f64], model: &Model, mode: Interpolation) -> Result<Vec<f64>> {
    if ys.len() < 2 || ys.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("jump-position grid must be strictly increasing".into()));
    }
    let dens: Vec<(f64, f64)> = ys.par_iter().map(|&y| jump_norm_sqr(psi, y, model, mode)).collect();
    let p: Vec<f64> = dens.iter().map(|d| d.0).collect();
    let truncated = trapezoid(ys, &dens.iter().map(|d| d.1).collect::<Vec<_>>());
    if truncated > TRUNCATION_TOL {
        return Err(GridFlag::Truncation { mass: truncated }.into());
    }
    let deficit = psi.norm_sqr() - trapezoid(ys, &p);
    if deficit.abs() > 1e-3 {
        return Err(GridFlag::InsufficientRange { deficit }.into());
    }
    Ok(p)
}

pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

/// Exact free propagation by a momentum-space phase. Flags spectra that
/// reach the Nyquist band and probability that wraps to the boundary.
pub fn free_evolve_grid(psi: &GridWavefunction, dt: f64, model: &Model) -> Result<GridWavefunction> {
    if !(dt >= 0.0) {
        return Err(Error::InvalidInput(format!("dt = {dt} must be non-negative")));
    }
    let nyq = psi.nyquist_mass();
    if nyq > ALIASING_TOL {
        return Err(GridFlag::Aliasing { mass: nyq }.into());
    }
    if dt == 0.0 {
        return Ok(psi.clone());
    }
    let n = psi.n();
    let mut planner = FftPlanner::new();
    let mut buf = psi.spectrum();
    let c = model.hbar * dt / (2.0 * model.mass);
    for (a, kk) in buf.iter_mut().zip(psi.wavenumbers()) {
        *a *= Complex64::from_polar(1.0, -c * kk * kk);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|a| *a *= scale);
    let out = GridWavefunction { x0: psi.x0, dx: psi.dx, amplitudes: buf };
    let leak = out.boundary_mass();
    if leak > BOUNDARY_TOL {
        return Err(GridFlag::BoundaryLeak { mass: leak }.into());
    }
    Ok(out)
}

/// Two well separated Gaussian peaks `c₊ φ(+α) + c₋ φ(-α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Superposition {
    pub alpha: f64,
    pub gamma: f64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

impl Superposition {
    /// Requires `α² ≥ 100 r_c² ≥ 10⁴ γ` and unit total weight.
    pub fn check(&self, model: &Model) -> Result<()> {
        let r2 = model.r_c * model.r_c;
        if self.alpha * self.alpha < 100.0 * r2 * (1.0 - 1e-12) || r2 < 100.0 * self.gamma * (1.0 - 1e-12) {
            return Err(Error::Regime(format!(
                "need α² ≫ r_c² ≫ γ with ratios ≥ 100 (α = {}, γ = {}, r_c = {})",
                self.alpha, self.gamma, model.r_c
            )));
        }
        let w = self.c_plus.norm_sqr() + self.c_minus.norm_sqr();
        if (w - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("|c₊|² + |c₋|² = {w}, expected 1")));
        }
        Ok(())
    }

    /// The state on `n` points covering `±(α + 8 max(r_c, σ))`.
    pub fn on_grid(&self, n: usize, model: &Model) -> Result<GridWavefunction> {
        let plus = GaussianState::real(self.alpha, 0.0, self.gamma)?;
        let minus = GaussianState::real(-self.alpha, 0.0, self.gamma)?;
        let reach = self.alpha.abs() + 8.0 * model.r_c.max(self.gamma.sqrt());
        let dx = 2.0 * reach / n as f64;
        GridWavefunction::from_fn(-reach, dx, n, |x| {
            self.c_plus * plus.amplitude(x, model) + self.c_minus * minus.amplitude(x, model)
        })?
        .normalized()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseStats {
    pub n_samples: usize,
    pub plus: usize,
    pub minus: usize,
    pub undecided: usize,
    pub frequency_plus: f64,
    /// Binomial standard error of `frequency_plus` at the expected weight.
    pub std_error: f64,
    pub undecided_fraction: f64,
}

/// Outcome of one sampled jump on a superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
    Undecided,
}

/// Classifies by the probability left on `x > 0`; 0.99 or more is a
/// definite outcome.
pub fn classify(psi: &GridWavefunction) -> Outcome {
    let right = psi.mass_where(|x| x > 0.0) / psi.norm_sqr();
    if right >= 0.99 {
        Outcome::Plus
    } else if right <= 0.01 {
        Outcome::Minus
    } else {
        Outcome::Undecided
    }
}

/// Samples jump centres from the tabulated `p(y)`, applies the jump, and
/// counts which peak survives. Sample `i` draws from seed `seed + i`.
/// An undersampled initial state is flagged as aliasing.
pub fn superposition_experiment(
    sup: &Superposition,
    model: &Model,
    n_grid: usize,
    n_samples: usize,
    seed: u64,
) -> Result<CollapseStats> {
    sup.check(model)?;
    let psi = sup.on_grid(n_grid, model)?;
    let nyq = psi.nyquist_mass();
    if nyq > ALIASING_TOL {
        return Err(GridFlag::Aliasing { mass: nyq }.into());
    }
    let ys: Vec<f64> = (0..psi.n()).map(|j| psi.x(j)).collect();
    let dens = jump_density_grid(&psi, &ys, model, Interpolation::Cubic)?;
    let table = InverseCdf::new(&ys, &dens);
    let outcomes: Vec<Outcome> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = StreamRng::new(seed.wrapping_add(i), 0);
            let y = table.sample(rng.uniform());
            apply_jump_grid(&psi, y, model, Interpolation::Cubic).map(|j| classify(&j.psi))
        })
        .collect::<Result<_>>()?;
    let count = |o: Outcome| outcomes.iter().filter(|&&x| x == o).count();
    let (plus, minus, undecided) = (count(Outcome::Plus), count(Outcome::Minus), count(Outcome::Undecided));
    let n = n_samples as f64;
    let w = sup.c_plus.norm_sqr();
    Ok(CollapseStats {
        n_samples,
        plus,
        minus,
        undecided,
        frequency_plus: plus as f64 / n,
        std_error: (w * (1.0 - w) / n).sqrt(),
        undecided_fraction: undecided as f64 / n,
    })
}

/// Piecewise-linear density tabulation sampled by inverting its
/// trapezoidal cumulative distribution.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdf {
    pub fn new(xs: &[f64], density: &[f64]) -> Self {
        let mut cdf = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for (x, p) in xs.windows(2).zip(density.windows(2)) {
            acc += 0.5 * (x[1] - x[0]) * (p[0] + p[1]);
            cdf.push(acc);
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Self { xs: xs.to_vec(), cdf }
    }

    pub fn sample(&self, u: f64) -> f64 {
        let j = self.cdf.partition_point(|&c| c < u).clamp(1, self.xs.len() - 1);
        let (c0, c1) = (self.cdf[j - 1], self.cdf[j]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        self.xs[j - 1] + t * (self.xs[j] - self.xs[j - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(k: f64) -> Model {
        Model::dimensionless(k, 1.0).unwrap()
    }

    #[test]
    fn rejects_non_power_of_two() {
        let a = vec![Complex64::new(1.0, 0.0); 100];
        assert!(matches!(GridWavefunction::new(0.0, 0.1, a), Err(Error::Grid(GridFlag::NotPowerOfTwo(100)))));
    }

    #[test]
    fn cubic_interpolation_is_exact_for_cubics() {
        let psi = GridWavefunction::from_fn(-1.0, 0.125, 16, |x| Complex64::new(x * x * x - x, 2.0 * x * x)).unwrap();
        let x = 0.3217;
        let v = psi.interpolate(x, Interpolation::Cubic);
        assert!((v - Complex64::new(x * x * x - x, 2.0 * x * x)).norm() < 1e-13);
    }

    #[test]
    fn grw_grid_jump_is_pure_multiplication() {
        let m = model(0.0);
        let s = GaussianState::real(0.0, 0.0, 1.0).unwrap();
        let psi = s.auto_grid(10.0, 1024, &m).unwrap();
        let j = apply_jump_grid(&psi, 0.7, &m, Interpolation::Cubic).unwrap();
        assert_eq!(j.truncated, 0.0);
        let expect = s.apply_jump(0.7, &m).evaluate_on_grid(psi.x0, psi.dx, psi.n(), &m).unwrap();
        assert!(j.psi.distance_up_to_phase(&expect) < 1e-10);
    }

    #[test]
    fn inverse_cdf_uniform() {
        let xs = [0.0, 1.0, 2.0];
        let t = InverseCdf::new(&xs, &[1.0, 1.0, 1.0]);
        assert!((t.sample(0.25) - 0.5).abs() < 1e-15);
        assert!((t.sample(0.75) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let psi = GaussianState::real(0.0, 1.0, 1.0).unwrap().auto_grid(10.0, 64, &model(0.0)).unwrap();
        let mut buf = Vec::new();
        psi.write_csv(&mut buf).unwrap();
        let back = GridWavefunction::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.amplitudes, psi.amplitudes);
        assert!((back.dx - psi.dx).abs() < 1e-15);
    }
}
