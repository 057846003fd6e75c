// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise-deterministic trajectories and ensemble statistics.
//!
//! Jumps arrive as a Poisson process of rate `λ` whatever the state, so
//! waiting times are drawn independently of the wavefunction. Each jump
//! centre is drawn from the exact Gaussian density of the pre-jump state.
//! Waiting times and positions use separate random streams; the times-only
//! sampler therefore follows exactly the same jump instants and widths as
//! the full sampler for a given seed.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{free_width, jump_width, width_variance, GaussianState, Observables};
use crate::params::{Model, Quantity};
use crate::rng::{StreamRng, POSITION_STREAM, TIME_STREAM};
use crate::stats::{CoMoments, Moments};

/// Trajectories folded per parallel block. Fixed so that the reduction
/// order never depends on the thread count.
const BLOCK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub t: f64,
    pub y: f64,
}

/// Ordered jump events of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub events: Vec<JumpEvent>,
    pub t_final: f64,
    pub seed: u64,
}

impl TrajectoryRecord {
    pub fn check(&self) -> Result<()> {
        let mut last = f64::NEG_INFINITY;
        for (i, e) in self.events.iter().enumerate() {
            if !(e.t > last) || !e.y.is_finite() {
                return Err(Error::Record(format!("event {i} at t = {} is not after t = {last}", e.t)));
            }
            last = e.t;
        }
        if last > self.t_final {
            return Err(Error::Record(format!("event at t = {last} after t_final = {}", self.t_final)));
        }
        Ok(())
    }
}

/// What moves the state between jumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flow {
    /// Free Schrödinger evolution.
    #[default]
    Schrodinger,
    /// No evolution between jumps; only the jump operators act.
    JumpsOnly,
}

/// Poisson jump instants from the time stream.
#[derive(Debug, Clone)]
struct JumpClock {
    rng: StreamRng,
    rate: f64,
    next: f64,
}

impl JumpClock {
    fn new(seed: u64, rate: f64) -> Self {
        let mut rng = StreamRng::new(seed, TIME_STREAM);
        let next = rng.exponential(rate);
        Self { rng, rate, next }
    }

    fn advance(&mut self) {
        self.next += self.rng.exponential(self.rate);
    }
}

/// A single trajectory advanced on demand.
#[derive(Debug, Clone)]
pub struct Trajectory {
    model: Model,
    flow: Flow,
    state: GaussianState,
    t: f64,
    clock: JumpClock,
    positions: StreamRng,
    events: Option<Vec<JumpEvent>>,
    jumps: u64,
}

impl Trajectory {
    pub fn new(model: Model, s0: GaussianState, seed: u64, flow: Flow) -> Self {
        Self {
            model,
            flow,
            state: s0,
            t: 0.0,
            clock: JumpClock::new(seed, model.lambda),
            positions: StreamRng::new(seed, POSITION_STREAM),
            events: None,
            jumps: 0,
        }
    }

    fn recording(mut self) -> Self {
        self.events = Some(Vec::new());
        self
    }

    fn flow_by(&self, s: &GaussianState, dt: f64) -> GaussianState {
        match self.flow {
            Flow::Schrodinger => s.free_evolve(dt, &self.model),
            Flow::JumpsOnly => *s,
        }
    }

    /// Performs every jump with `t_j ≤ t`. Returns the post-jump states.
    fn advance_to(&mut self, t: f64, mut on_jump: impl FnMut(&GaussianState)) {
        while self.clock.next <= t {
            let tj = self.clock.next;
            let pre = self.flow_by(&self.state, tj - self.t);
            let dens = pre.jump_position_density(&self.model);
            let y = self.positions.normal(dens.mean, dens.std_dev());
            self.state = pre.apply_jump(y, &self.model);
            self.t = tj;
            self.jumps += 1;
            if let Some(ev) = self.events.as_mut() {
                ev.push(JumpEvent { t: tj, y });
            }
            on_jump(&self.state);
            self.clock.advance();
        }
    }

    /// State at `t ≥` the last jump, without consuming the pending jump.
    pub fn state_at(&mut self, t: f64) -> GaussianState {
        self.advance_to(t, |_| {});
        self.flow_by(&self.state, t - self.t)
    }

    pub fn jump_count(&self) -> u64 {
        self.jumps
    }
}

/// Output of [`sample_trajectory`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    pub record: TrajectoryRecord,
    /// Observables right after each jump.
    pub event_observables: Vec<Observables>,
    pub final_state: GaussianState,
}

pub fn sample_trajectory(model: &Model, s0: &GaussianState, t_final: f64, seed: u64) -> Result<SampledTrajectory> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput(format!("t_final = {t_final} must be positive")));
    }
    s0.check()?;
    let mut traj = Trajectory::new(*model, *s0, seed, Flow::Schrodinger).recording();
    let mut obs = Vec::new();
    traj.advance_to(t_final, |s| obs.push(s.observables(model)));
    let final_state = traj.state.free_evolve(t_final - traj.t, model);
    let events = traj.events.take().unwrap_or_default();
    Ok(SampledTrajectory { record: TrajectoryRecord { events, t_final, seed }, event_observables: obs, final_state })
}

/// Replays a record with the same Gaussian updates used while sampling.
pub fn resolve_trajectory(record: &TrajectoryRecord, s0: &GaussianState, model: &Model) -> Result<GaussianState> {
    record.check()?;
    let mut s = *s0;
    let mut t = 0.0;
    for e in &record.events {
        s = s.free_evolve(e.t - t, model).apply_jump(e.y, model);
        t = e.t;
    }
    Ok(s.free_evolve(record.t_final - t, model))
}

/// Width after the record, written as the nested map
/// `𝒢_m(…𝒢_1(γ)) + iħτ/M` with `𝒢_j(x) = ((x + iħτ_j/M)⁻¹ s² + 1/R)⁻¹`.
pub fn closed_form_width(record: &TrajectoryRecord, gamma0: Complex64, model: &Model) -> Complex64 {
    let s2 = model.contraction().powi(2);
    let r = model.envelope_var();
    let i_hm = Complex64::new(0.0, model.hbar / model.mass);
    let mut x = gamma0;
    let mut t_prev = 0.0;
    for e in &record.events {
        x = 1.0 / ((x + i_hm * (e.t - t_prev)).inv() * s2 + 1.0 / r);
        t_prev = e.t;
    }
    x + i_hm * (record.t_final - t_prev)
}

/// `β (1-k)^m / (1+k)^m` after `m` jumps.
pub fn closed_form_beta(beta0: f64, jumps: usize, model: &Model) -> f64 {
    beta0 * ((1.0 - model.k) / (1.0 + model.k)).powi(jumps as i32)
}

/// `α_t` as the explicit sum over jumps
/// `Π_{j≥1} g_j (α + βτ₁/M) + Σ_j Π_{l>j} g_l ((1-g_j) y_j + β_j τ_{j+1}/M)`,
/// where `g_j` is the gain of the width just before jump `j`.
pub fn closed_form_alpha(record: &TrajectoryRecord, s0: &GaussianState, model: &Model) -> Complex64 {
    let m = record.events.len();
    let s = model.contraction();
    let times: Vec<f64> = std::iter::once(0.0).chain(record.events.iter().map(|e| e.t)).collect();
    let tau = |j: usize| if j < m { times[j + 1] - times[j] } else { record.t_final - times[m] };
    let i_hm = Complex64::new(0.0, model.hbar / model.mass);
    let mut gains = Vec::with_capacity(m);
    let mut width = s0.gamma;
    for j in 0..m {
        let pre = width + i_hm * tau(j);
        let inv = pre.inv();
        gains.push(s * inv / (s * s * inv + 1.0 / model.envelope_var()));
        width = jump_width(pre, model);
    }
    let tail = |from: usize| gains[from..].iter().product::<Complex64>();
    let mut alpha = tail(0) * (s0.alpha + s0.beta * tau(0) / model.mass);
    for j in 1..=m {
        let beta_j = closed_form_beta(s0.beta, j, model);
        alpha += tail(j) * ((1.0 - gains[j - 1]) * record.events[j - 1].y + beta_j * tau(j) / model.mass);
    }
    alpha
}

/// Ensemble observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    MeanX,
    MeanP,
    Energy,
    /// `E[(Δ_ψ X)²]`, the mean wavefunction variance.
    VarXPsi,
    /// `(Δ_ρ X)²`, the variance of the averaged state.
    VarXRho,
    /// Population variance of `⟨X⟩_ψ` over trajectories.
    VarTrajMeanX,
    /// Free-evolution reference for `E[(Δ_ψ X)²]`.
    VarXFree,
}

impl Observable {
    pub const ENSEMBLE: [Observable; 6] = [
        Observable::MeanX,
        Observable::MeanP,
        Observable::Energy,
        Observable::VarXPsi,
        Observable::VarXRho,
        Observable::VarTrajMeanX,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::MeanX => "mean_x",
            Observable::MeanP => "mean_p",
            Observable::Energy => "energy",
            Observable::VarXPsi => "var_x_psi",
            Observable::VarXRho => "var_x_rho",
            Observable::VarTrajMeanX => "var_traj_mean_x",
            Observable::VarXFree => "var_x_free",
        }
    }

    /// Dimension, with energies in the model's own unit.
    pub fn quantity(self) -> Quantity {
        match self {
            Observable::MeanX => Quantity::Length,
            Observable::MeanP => Quantity::Momentum,
            Observable::Energy => Quantity::Energy,
            _ => Quantity::Variance,
        }
    }
}

/// Estimates of one observable on the time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub observable: Observable,
    pub estimate: Vec<f64>,
    /// `None` where no standard error exists (e.g. a single trajectory).
    pub std_error: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSeries {
    pub t_grid: Vec<f64>,
    pub n_traj: usize,
    pub base_seed: u64,
    pub series: Vec<Series>,
}

impl EnsembleSeries {
    pub fn get(&self, o: Observable) -> Option<&Series> {
        self.series.iter().find(|s| s.observable == o)
    }

    /// Panicking accessor for observables known to be present.
    pub fn series(&self, o: Observable) -> &Series {
        self.get(o).unwrap_or_else(|| panic!("series {} not computed", o.name()))
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct PointAcc {
    mean_x: Moments,
    mean_p: Moments,
    energy: Moments,
    var_x: Moments,
    second_and_mean: CoMoments,
}

impl PointAcc {
    fn push(&mut self, o: &Observables) {
        self.mean_x.push(o.mean_x);
        self.mean_p.push(o.mean_p);
        self.energy.push(o.kinetic_energy);
        self.var_x.push(o.var_x);
        self.second_and_mean.push(o.var_x + o.mean_x * o.mean_x, o.mean_x);
    }

    /// `(Δ_ρ X)² = E[(Δ_ψ X)²] + Var(⟨X⟩)` and its delta-method error,
    /// `Var(Q - 2μ⟨X⟩)/n` with `Q = ⟨X²⟩`.
    fn var_rho(&self) -> (f64, Option<f64>) {
        let est = self.var_x.mean() + self.mean_x.population_variance();
        let mu = self.mean_x.mean();
        let se = self.second_and_mean.sample_covariance().map(|(vq, vm, c)| {
            let v = vq - 4.0 * mu * c + 4.0 * mu * mu * vm;
            (v.max(0.0) / self.second_and_mean.count() as f64).sqrt()
        });
        (est, se)
    }
}

fn check_grid(t_grid: &[f64], n_traj: usize) -> Result<()> {
    if n_traj == 0 {
        return Err(Error::InvalidInput("n_traj must be at least 1".into()));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("time grid must be non-empty, finite and non-negative".into()));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("time grid must be sorted".into()));
    }
    Ok(())
}

/// Runs `f(i)` for `i in 0..n` in parallel blocks and folds the results in
/// index order.
fn fold_in_order<T: Send>(n: usize, f: impl Fn(u64) -> T + Sync, mut fold: impl FnMut(T)) {
    let mut start = 0;
    while start < n {
        let end = (start + BLOCK).min(n);
        let block: Vec<T> = (start as u64..end as u64).into_par_iter().map(&f).collect();
        block.into_iter().for_each(&mut fold);
        start = end;
    }
}

/// Ensemble of full trajectories with seeds `base_seed + i`.
#[derive(Debug, Clone)]
pub struct Ensemble<'a> {
    pub model: Model,
    pub s0: GaussianState,
    pub t_grid: &'a [f64],
    pub n_traj: usize,
    pub base_seed: u64,
    pub flow: Flow,
}

impl Ensemble<'_> {
    pub fn run(&self) -> Result<EnsembleSeries> {
        check_grid(self.t_grid, self.n_traj)?;
        self.s0.check()?;
        let mut acc = vec![PointAcc::default(); self.t_grid.len()];
        fold_in_order(
            self.n_traj,
            |i| {
                let mut traj = Trajectory::new(self.model, self.s0, self.base_seed.wrapping_add(i), self.flow);
                self.t_grid.iter().map(|&t| traj.state_at(t).observables(&self.model)).collect::<Vec<_>>()
            },
            |rows| acc.iter_mut().zip(&rows).for_each(|(a, o)| a.push(o)),
        );
        let mean_series = |o: Observable, pick: fn(&PointAcc) -> &Moments| Series {
            observable: o,
            estimate: acc.iter().map(|a| pick(a).mean()).collect(),
            std_error: acc.iter().map(|a| pick(a).std_error()).collect(),
        };
        let (rho, rho_se): (Vec<f64>, Vec<Option<f64>>) = acc.iter().map(PointAcc::var_rho).unzip();
        let series = vec![
            mean_series(Observable::MeanX, |a| &a.mean_x),
            mean_series(Observable::MeanP, |a| &a.mean_p),
            mean_series(Observable::Energy, |a| &a.energy),
            mean_series(Observable::VarXPsi, |a| &a.var_x),
            Series { observable: Observable::VarXRho, estimate: rho, std_error: rho_se },
            Series {
                observable: Observable::VarTrajMeanX,
                estimate: acc.iter().map(|a| a.mean_x.population_variance()).collect(),
                std_error: acc.iter().map(|a| a.mean_x.variance_std_error()).collect(),
            },
        ];
        Ok(EnsembleSeries { t_grid: self.t_grid.to_vec(), n_traj: self.n_traj, base_seed: self.base_seed, series })
    }
}

pub fn ensemble_statistics(
    model: &Model,
    s0: &GaussianState,
    t_grid: &[f64],
    n_traj: usize,
    base_seed: u64,
) -> Result<EnsembleSeries> {
    Ensemble { model: *model, s0: *s0, t_grid, n_traj, base_seed, flow: Flow::Schrodinger }.run()
}

/// Width-only trajectory driven by the time stream alone.
#[derive(Debug, Clone)]
struct WidthPath {
    gamma: Complex64,
    t: f64,
    clock: JumpClock,
    flow: Flow,
}

impl WidthPath {
    fn flow_by(&self, g: Complex64, dt: f64, model: &Model) -> Complex64 {
        match self.flow {
            Flow::Schrodinger => free_width(g, dt, model),
            Flow::JumpsOnly => g,
        }
    }

    fn variance_at(&mut self, t: f64, model: &Model) -> f64 {
        while self.clock.next <= t {
            let tj = self.clock.next;
            self.gamma = jump_width(self.flow_by(self.gamma, tj - self.t, model), model);
            self.t = tj;
            self.clock.advance();
        }
        width_variance(self.flow_by(self.gamma, t - self.t, model))
    }
}

/// `E[(Δ_ψ X)²]` sampling only the jump instants, since the width does not
/// depend on the jump positions. Path by path it reproduces the widths of
/// [`Ensemble::run`] for the same seeds.
pub fn expected_variance_timeonly(
    model: &Model,
    gamma0: Complex64,
    t_grid: &[f64],
    n_traj: usize,
    base_seed: u64,
    flow: Flow,
) -> Result<EnsembleSeries> {
    check_grid(t_grid, n_traj)?;
    if !(gamma0.re > 0.0) {
        return Err(Error::InvalidInput(format!("Re γ must be positive, got {gamma0}")));
    }
    let mut acc = vec![Moments::default(); t_grid.len()];
    fold_in_order(
        n_traj,
        |i| {
            let mut path = WidthPath {
                gamma: gamma0,
                t: 0.0,
                clock: JumpClock::new(base_seed.wrapping_add(i), model.lambda),
                flow,
            };
            t_grid.iter().map(|&t| path.variance_at(t, model)).collect::<Vec<_>>()
        },
        |row| acc.iter_mut().zip(&row).for_each(|(a, v)| a.push(*v)),
    );
    let free = t_grid.iter().map(|&t| width_variance(free_width(gamma0, t, model))).collect();
    Ok(EnsembleSeries {
        t_grid: t_grid.to_vec(),
        n_traj,
        base_seed,
        series: vec![
            Series {
                observable: Observable::VarXPsi,
                estimate: acc.iter().map(Moments::mean).collect(),
                std_error: acc.iter().map(Moments::std_error).collect(),
            },
            Series { observable: Observable::VarXFree, estimate: free, std_error: vec![None; t_grid.len()] },
        ],
    })
}

/// Jump counts by `t` for seeds `base_seed + i`.
pub fn jump_counts(model: &Model, t: f64, n_traj: usize, base_seed: u64) -> Vec<u64> {
    (0..n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let mut clock = JumpClock::new(base_seed.wrapping_add(i), model.lambda);
            let mut n = 0;
            while clock.next <= t {
                n += 1;
                clock.advance();
            }
            n
        })
        .collect()
}

/// Evenly spaced times.
pub fn linear_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points).map(|i| start + (stop - start) * i as f64 / (points - 1) as f64).collect(),
    }
}

/// Log-spaced times; `start` must be positive.
pub fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let (a, b) = (start.ln(), stop.ln());
    linear_grid(a, b, points).into_iter().map(f64::exp).collect()
}
