// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Runs a resolved configuration and produces its primary artifact.

use std::fmt::Write as _;

use dgrw_core::amplify::{
    rigid_body_reduce, two_particle_jump_means, two_particle_jump_means_approx, TwoParticleGaussian,
};
use dgrw_core::grid::{superposition_experiment, Superposition};
use dgrw_core::io::{write_series_csv, OutputUnits};
use dgrw_core::oracle::{
    asymptotic_variances, characteristic_function, chi_moments, collisional_correspondence, exact_moments,
    free_variance, mean_energy, mean_momentum, momentum_transfer_checks, var_x_rho,
};
use dgrw_core::trajectory::{expected_variance_timeonly, linear_grid, Ensemble};
use dgrw_core::{Complex64, EnsembleSeries, Flow, GaussianState, Model, Quantity, UnitSystem};
use serde_json::{json, Value};

use crate::args::{OracleKind, Units};
use crate::config::{RunConfig, StateSpec, TableSpec, Task};
use crate::error::Failure;

/// Output bytes plus the run facts recorded in the manifest.
pub struct Artifact {
    pub bytes: Vec<u8>,
    pub seed: u64,
    pub n_traj: usize,
    pub t_grid: Vec<f64>,
}

impl Artifact {
    fn json(v: &Value) -> Self {
        let mut bytes = serde_json::to_vec_pretty(v).expect("JSON values serialize");
        bytes.push(b'\n');
        Self { bytes, seed: 0, n_traj: 0, t_grid: Vec::new() }
    }
}

/// Converts between the configured units and the dimensionless model.
struct Conv {
    units: Units,
    sys: UnitSystem,
}

impl Conv {
    fn new(cfg: &RunConfig) -> Self {
        Self { units: cfg.units, sys: UnitSystem::nondimensional(&cfg.params) }
    }

    fn to_model(&self, v: f64, q: Quantity) -> f64 {
        match self.units {
            Units::Nondim => v,
            Units::Si => self.sys.nondimensionalize(v, q),
        }
    }

    fn to_units(&self, v: f64, q: Quantity) -> f64 {
        match (self.units, q) {
            (Units::Nondim, _) => v,
            (Units::Si, Quantity::Energy) => v * self.sys.model_energy_scale(),
            (Units::Si, _) => self.sys.dimensionalize(v, q),
        }
    }

    /// A rate of change of a quantity of kind `q`.
    fn rate_to_units(&self, v: f64, q: Quantity) -> f64 {
        self.to_units(v, q) / self.to_units(1.0, Quantity::Time)
    }

    fn output_units(&self) -> OutputUnits {
        match self.units {
            Units::Nondim => OutputUnits::Nondimensional,
            Units::Si => OutputUnits::Si(self.sys),
        }
    }

    fn state(&self, s: &StateSpec) -> Result<GaussianState, Failure> {
        let len = |v| self.to_model(v, Quantity::Length);
        let var = |v| self.to_model(v, Quantity::Variance);
        Ok(GaussianState::new(
            Complex64::new(len(s.alpha), len(s.alpha_im)),
            self.to_model(s.beta, Quantity::Momentum),
            Complex64::new(var(s.gamma), var(s.gamma_im)),
        )?)
    }

    fn times(&self, ts: &[f64]) -> Vec<f64> {
        ts.iter().map(|&t| self.to_model(t, Quantity::Time)).collect()
    }
}

fn units_name(u: Units) -> &'static str {
    match u {
        Units::Si => "si",
        Units::Nondim => "nondim",
    }
}

fn csv_artifact(series: &EnsembleSeries, conv: &Conv, t_grid: Vec<f64>) -> Result<Artifact, Failure> {
    let mut bytes = Vec::new();
    write_series_csv(&mut bytes, series, conv.output_units())?;
    Ok(Artifact { bytes, seed: series.base_seed, n_traj: series.n_traj, t_grid })
}

pub fn execute(cfg: &RunConfig) -> Result<Artifact, Failure> {
    let conv = Conv::new(cfg);
    let model = cfg.params.model()?;
    match &cfg.task {
        Task::Params => Ok(Artifact::json(&json!({
            "preset": cfg.preset,
            "params": cfg.params,
            "derived": cfg.params.derive()?,
            "scales": conv.sys,
            "model": model,
        }))),
        Task::Ensemble { state, grid, n_traj, seed, flow } => {
            let times = grid.times()?;
            let t_model = conv.times(&times);
            let s0 = conv.state(state)?;
            let e = Ensemble { model, s0, t_grid: &t_model, n_traj: *n_traj, base_seed: *seed, flow: *flow }.run()?;
            csv_artifact(&e, &conv, times)
        }
        Task::Variance { gamma, gamma_im, grid, n_traj, seed, flow } => {
            let times = grid.times()?;
            let g =
                Complex64::new(conv.to_model(*gamma, Quantity::Variance), conv.to_model(*gamma_im, Quantity::Variance));
            let e = expected_variance_timeonly(&model, g, &conv.times(&times), *n_traj, *seed, *flow)?;
            csv_artifact(&e, &conv, times)
        }
        Task::Fig2 { gamma, grid, n_traj, seed, .. } => {
            let times = grid.times()?;
            let g = Complex64::new(conv.to_model(*gamma, Quantity::Variance), 0.0);
            let e = expected_variance_timeonly(&model, g, &conv.times(&times), *n_traj, *seed, Flow::Schrodinger)?;
            csv_artifact(&e, &conv, times)
        }
        Task::Oracle { kind, t, state, nu, mu } => {
            let value = oracle(*kind, *t, state, *nu, *mu, &model, &conv, cfg)?;
            Ok(Artifact::json(&json!({
                "kind": kind,
                "units": units_name(cfg.units),
                "t": t,
                "value": value,
            })))
        }
        Task::GridBorn { weight, alpha, gamma, n_grid, samples, seed } => {
            if !(0.0..=1.0).contains(weight) {
                return Err(Failure::config(format!("weight {weight} outside [0, 1]")));
            }
            let sup = Superposition {
                alpha: conv.to_model(*alpha, Quantity::Length),
                gamma: conv.to_model(*gamma, Quantity::Variance),
                c_plus: Complex64::new(weight.sqrt(), 0.0),
                c_minus: Complex64::new((1.0 - weight).sqrt(), 0.0),
            };
            let stats = superposition_experiment(&sup, &model, *n_grid, *samples, *seed)?;
            let mut a = Artifact::json(&json!({ "weight": weight, "stats": stats }));
            a.seed = *seed;
            Ok(a)
        }
        Task::Amplify { body: Some(body), .. } => {
            let reduced = rigid_body_reduce(body, cfg.params.r_c, cfg.params.v_eta)?;
            Ok(Artifact::json(&json!({ "params": reduced, "derived": reduced.derive()? })))
        }
        Task::Amplify { body: None, table: Some(table) } => two_particle_table(table, cfg),
        Task::Amplify { body: None, table: None } => Err(Failure::config("amplify needs a body or a table")),
    }
}

#[allow(clippy::too_many_arguments)]
fn oracle(
    kind: OracleKind,
    t: f64,
    state: &StateSpec,
    nu: f64,
    mu: f64,
    model: &Model,
    conv: &Conv,
    cfg: &RunConfig,
) -> Result<Value, Failure> {
    let s0 = conv.state(state)?;
    let th = conv.to_model(t, Quantity::Time);
    let o = s0.observables(model);
    let out = |v, q| conv.to_units(v, q);
    Ok(match kind {
        OracleKind::MeanP => json!(out(mean_momentum(o.mean_p, th, model), Quantity::Momentum)),
        OracleKind::MeanH => json!(out(mean_energy(o.kinetic_energy, th, model), Quantity::Energy)),
        OracleKind::VarXRho => json!(out(var_x_rho(free_variance(&s0, th, model), th, model), Quantity::Variance)),
        OracleKind::ExactMoments => {
            let m = exact_moments(&s0, th, model);
            json!({
                "mean_x": out(m.mean_x, Quantity::Length),
                "mean_p": out(m.mean_p, Quantity::Momentum),
                "var_x": out(m.var_x(), Quantity::Variance),
                "var_p": out(m.var_p(), Quantity::MomentumVariance),
                "energy": out(m.energy(model), Quantity::Energy),
            })
        }
        OracleKind::Chi => {
            if conv.units != Units::Nondim {
                return Err(Failure::config("chi takes dimensionless arguments; use --units nondim"));
            }
            let c = characteristic_function(nu, mu, th, &s0, model)?;
            json!({ "nu": nu, "mu": mu, "re": c.re, "im": c.im })
        }
        OracleKind::ChiMoments => {
            let c = chi_moments(th, &s0, model, 1e-3, 1e-3)?;
            json!({
                "mean_x": out(c.mean_x, Quantity::Length),
                "var_x": out(c.var_x, Quantity::Variance),
                "mean_p": out(c.mean_p, Quantity::Momentum),
            })
        }
        OracleKind::Asymptotic => {
            let a = asymptotic_variances(model)?;
            json!({
                "gamma_eq": [out(a.gamma_eq.re, Quantity::Variance), out(a.gamma_eq.im, Quantity::Variance)],
                "var_x": out(a.var_x, Quantity::Variance),
                "var_p": out(a.var_p, Quantity::MomentumVariance),
                "var_x_closed": out(a.var_x_closed, Quantity::Variance),
                "var_p_closed": out(a.var_p_closed, Quantity::MomentumVariance),
                "residual": a.residual,
            })
        }
        OracleKind::MomentumTransfer => {
            let m = momentum_transfer_checks(&s0, model)?;
            json!({
                "dp_dt": conv.rate_to_units(m.dp_dt, Quantity::Momentum),
                "dh_dt": conv.rate_to_units(m.dh_dt, Quantity::Energy),
                "dp_dt_closed": conv.rate_to_units(m.dp_dt_closed, Quantity::Momentum),
                "dh_dt_closed": conv.rate_to_units(m.dh_dt_closed, Quantity::Energy),
            })
        }
        OracleKind::Collisional => serde_json::to_value(collisional_correspondence(&cfg.params)).expect("serializable"),
    })
}

/// Exact and approximate post-jump means over `-2 r_c ≤ y ≤ 2 r_c`.
fn two_particle_table(t: &TableSpec, cfg: &RunConfig) -> Result<Artifact, Failure> {
    let (model, r_c) = match cfg.units {
        Units::Si => (cfg.params.model_si()?, cfg.params.r_c),
        Units::Nondim => (cfg.params.model()?, 1.0),
    };
    let s = TwoParticleGaussian { gamma_cm: t.gamma_cm, gamma_rel: t.gamma_rel, alpha_rel: t.alpha_rel };
    s.validate()?;
    let mut csv = String::from("y,mean_x_cm,mean_x_rel,mean_x_cm_approx,mean_x_rel_approx\n");
    for y in linear_grid(-2.0 * r_c, 2.0 * r_c, t.points) {
        let (e, a) = (two_particle_jump_means(&s, y, &model), two_particle_jump_means_approx(&s, y, &model));
        writeln!(csv, "{y:e},{:e},{:e},{:e},{:e}", e.mean_x_cm, e.mean_x_rel, a.mean_x_cm, a.mean_x_rel)
            .expect("writing to a String");
    }
    Ok(Artifact { bytes: csv.into_bytes(), seed: 0, n_traj: 0, t_grid: Vec::new() })
}
