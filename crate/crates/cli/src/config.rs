// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Fully resolved run configurations.
//!
//! Every default is filled in before a run starts, so the serialized
//! [`RunConfig`] stored in a manifest replays the run exactly.

use std::fs;
use std::path::{Path, PathBuf};

use dgrw_core::amplify::BodySpec;
use dgrw_core::trajectory::{linear_grid, log_grid};
use dgrw_core::{Flow, ModelParams, Preset};
use serde::{Deserialize, Serialize};

use crate::args::{
    AmplifyCmd, EnsembleCmd, FlowArg, GridArgs, GridBornCmd, OracleCmd, OracleKind, OutputArgs, Panel, ParamArgs,
    Spacing, StateArgs, Units, VarianceCmd,
};
use crate::error::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: ModelParams,
    pub preset: Option<Preset>,
    pub units: Units,
    pub task: Task,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub out: Option<PathBuf>,
    pub manifest_out: Option<PathBuf>,
}

impl Outputs {
    pub fn from_args(a: &OutputArgs) -> Self {
        Self { out: a.out.clone(), manifest_out: a.manifest_out.clone() }
    }

    /// Explicit manifest path, else one next to the primary output.
    pub fn manifest_path(&self) -> Option<PathBuf> {
        self.manifest_out.clone().or_else(|| self.out.as_ref().map(|p| p.with_extension("manifest.json")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl TimeGrid {
    pub fn times(&self) -> Result<Vec<f64>, Failure> {
        let ok = self.points > 0
            && self.start.is_finite()
            && self.stop.is_finite()
            && self.start >= 0.0
            && self.stop >= self.start
            && (self.spacing == Spacing::Linear || self.start > 0.0);
        if !ok {
            return Err(Failure::config(format!("invalid time grid {self:?}")));
        }
        Ok(match self.spacing {
            Spacing::Linear => linear_grid(self.start, self.stop, self.points),
            Spacing::Log => log_grid(self.start, self.stop, self.points),
        })
    }
}

/// Initial Gaussian in the configured units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub alpha: f64,
    pub alpha_im: f64,
    pub beta: f64,
    pub gamma: f64,
    pub gamma_im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub gamma_cm: f64,
    pub gamma_rel: f64,
    pub alpha_rel: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Task {
    Params,
    Ensemble { state: StateSpec, grid: TimeGrid, n_traj: usize, seed: u64, flow: Flow },
    Variance { gamma: f64, gamma_im: f64, grid: TimeGrid, n_traj: usize, seed: u64, flow: Flow },
    Oracle { kind: OracleKind, t: f64, state: StateSpec, nu: f64, mu: f64 },
    GridBorn { weight: f64, alpha: f64, gamma: f64, n_grid: usize, samples: usize, seed: u64 },
    Amplify { body: Option<BodySpec>, table: Option<TableSpec> },
    Fig2 { panel: Panel, gamma: f64, grid: TimeGrid, n_traj: usize, seed: u64 },
}

/// Resolved parameters and the preset they came from, if any.
pub struct Resolved {
    pub params: ModelParams,
    pub preset: Option<Preset>,
    pub units: Units,
}

impl Resolved {
    pub fn from_args(a: &ParamArgs) -> Result<Self, Failure> {
        if let (Some(k), Some(eps)) = (a.k, a.eps_hat) {
            return Ok(Self { params: ModelParams::from_dimensionless(k, eps)?, preset: None, units: a.units });
        }
        let (mut params, preset) = match (&a.config, a.preset) {
            (Some(path), _) => {
                let text = read_input(path)?;
                let preset = text
                    .lines()
                    .filter_map(|l| l.split('#').next()?.split_once('='))
                    .find(|(k, _)| k.trim() == "preset")
                    .and_then(|(_, v)| v.trim().parse().ok());
                (ModelParams::from_config_str(&text)?, preset)
            }
            (None, Some(p)) => (p.params(), Some(p)),
            (None, None) => (Preset::Grw1986.params(), Some(Preset::Grw1986)),
        };
        let overrides = [
            (a.lambda_rate, &mut params.lambda_rate),
            (a.r_c, &mut params.r_c),
            (a.v_eta, &mut params.v_eta),
            (a.mass, &mut params.mass),
        ];
        let mut changed = false;
        for (v, slot) in overrides {
            if let Some(v) = v {
                *slot = v;
                changed = true;
            }
        }
        params.validate()?;
        Ok(Self { params, preset: if changed { None } else { preset }, units: a.units })
    }

    /// `r_c` and `r_c²` in the configured units.
    fn r_c(&self) -> f64 {
        match self.units {
            Units::Si => self.params.r_c,
            Units::Nondim => 1.0,
        }
    }

    fn grid(&self, g: &GridArgs) -> TimeGrid {
        let micro = matches!(self.preset, Some(Preset::Grw1986 | Preset::Adler2007 | Preset::Nucleon));
        let spacing = g.spacing.unwrap_or(if micro { Spacing::Log } else { Spacing::Linear });
        let start = g.t_start.unwrap_or(match spacing {
            Spacing::Linear => 0.0,
            Spacing::Log => g.t_stop * 1e-6,
        });
        TimeGrid { start, stop: g.t_stop, points: g.points, spacing }
    }

    fn state(&self, s: &StateArgs) -> StateSpec {
        StateSpec {
            alpha: s.alpha,
            alpha_im: s.alpha_im,
            beta: s.beta,
            gamma: s.gamma.unwrap_or(self.r_c().powi(2)),
            gamma_im: s.gamma_im,
        }
    }

    fn config(self, task: Task, out: &OutputArgs) -> RunConfig {
        RunConfig {
            params: self.params,
            preset: self.preset,
            units: self.units,
            task,
            outputs: Outputs::from_args(out),
        }
    }
}

pub fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))
}

fn flow(f: FlowArg) -> Flow {
    match f {
        FlowArg::Schrodinger => Flow::Schrodinger,
        FlowArg::JumpsOnly => Flow::JumpsOnly,
    }
}

pub fn params_config(a: &ParamArgs, out: &OutputArgs) -> Result<RunConfig, Failure> {
    Ok(Resolved::from_args(a)?.config(Task::Params, out))
}

pub fn ensemble_config(c: &EnsembleCmd) -> Result<RunConfig, Failure> {
    let r = Resolved::from_args(&c.params)?;
    let task = Task::Ensemble {
        state: r.state(&c.state),
        grid: r.grid(&c.grid),
        n_traj: c.n_traj,
        seed: c.seed,
        flow: flow(c.flow),
    };
    Ok(r.config(task, &c.output))
}

pub fn variance_config(c: &VarianceCmd) -> Result<RunConfig, Failure> {
    let r = Resolved::from_args(&c.params)?;
    let task = Task::Variance {
        gamma: c.gamma.unwrap_or(r.r_c().powi(2)),
        gamma_im: c.gamma_im,
        grid: r.grid(&c.grid),
        n_traj: c.n_traj,
        seed: c.seed,
        flow: flow(c.flow),
    };
    Ok(r.config(task, &c.output))
}

pub fn oracle_config(c: &OracleCmd) -> Result<RunConfig, Failure> {
    let r = Resolved::from_args(&c.params)?;
    let task = Task::Oracle { kind: c.kind, t: c.t, state: r.state(&c.state), nu: c.nu, mu: c.mu };
    Ok(r.config(task, &c.output))
}

pub fn grid_born_config(c: &GridBornCmd) -> Result<RunConfig, Failure> {
    let r = Resolved::from_args(&c.params)?;
    let rc = r.r_c();
    let task = Task::GridBorn {
        weight: c.weight,
        alpha: c.alpha.unwrap_or(10.0 * rc),
        gamma: c.gamma.unwrap_or(0.01 * rc * rc),
        n_grid: c.n_grid,
        samples: c.samples,
        seed: c.seed,
    };
    Ok(r.config(task, &c.output))
}

pub fn amplify_config(c: &AmplifyCmd) -> Result<RunConfig, Failure> {
    let r = Resolved::from_args(&c.params)?;
    let body = match &c.body {
        Some(path) => Some(
            serde_json::from_str::<BodySpec>(&read_input(path)?)
                .map_err(|e| Failure::config(format!("body spec {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let rc = r.r_c();
    let table = c.two_particle.then(|| TableSpec {
        gamma_cm: c.gamma_cm.unwrap_or(1e-3 * rc * rc),
        gamma_rel: c.gamma_rel.unwrap_or(1e-3 * rc * rc),
        alpha_rel: c.alpha_rel.unwrap_or(rc),
        points: c.points,
    });
    Ok(r.config(Task::Amplify { body, table }, &c.output))
}

/// Panels (a, b) follow a microscopic particle over `1 s ≤ t ≤ 1e10 s`;
/// (c, d) the centre of mass of a 1 g body over `0 ≤ λt ≤ 20`. Widths are
/// `r_c²`, `1e-6 r_c²`, `1e6 r_c²` and `1e12 r_c²`.
pub fn fig2_config(c: &crate::args::Fig2Cmd) -> Result<RunConfig, Failure> {
    let (preset, gamma_hat) = match c.panel {
        Panel::A => (Preset::Grw1986, 1.0),
        Panel::B => (Preset::Grw1986, 1e-6),
        Panel::C => (Preset::Macro1g, 1e6),
        Panel::D => (Preset::Macro1g, 1e12),
    };
    let params = preset.params();
    let (scale_t, scale_g) = match c.units {
        Units::Si => (1.0, params.r_c * params.r_c),
        Units::Nondim => (params.lambda_rate, 1.0),
    };
    let grid = match preset {
        Preset::Macro1g => TimeGrid {
            start: 0.0,
            stop: 20.0 / params.lambda_rate * scale_t,
            points: c.points,
            spacing: Spacing::Linear,
        },
        _ => TimeGrid { start: scale_t, stop: 1e10 * scale_t, points: c.points, spacing: Spacing::Log },
    };
    let task = Task::Fig2 { panel: c.panel, gamma: gamma_hat * scale_g, grid, n_traj: c.n_traj, seed: c.seed };
    Ok(RunConfig { params, preset: Some(preset), units: c.units, task, outputs: Outputs::from_args(&c.output) })
}
