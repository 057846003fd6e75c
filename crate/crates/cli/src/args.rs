// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dgrw_core::Preset;
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "dgrw", version, about = "Dissipative GRW collapse-model simulator and analytic oracles")]
pub struct Cli {
    /// Worker threads. Results do not depend on this value.
    #[arg(long, global = true, env = "DGRW_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print parameters, derived quantities and unit scales as JSON.
    Params(ParamsCmd),
    /// Monte Carlo ensemble of full Gaussian trajectories.
    Ensemble(EnsembleCmd),
    /// Expected wavefunction variance from jump instants only.
    Variance(VarianceCmd),
    /// Analytic predictions as JSON.
    Oracle(OracleCmd),
    /// Born-rule statistics of jumps on a two-peak superposition.
    GridBorn(GridBornCmd),
    /// Rigid-body reduction and two-particle jump tables.
    Amplify(AmplifyCmd),
    /// Expected position variance for one panel of the localization figure.
    Fig2(Fig2Cmd),
    /// Re-run the configuration stored in a manifest.
    Run(RunCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Si,
    Nondim,
}

/// Model parameters: a preset or config file, SI overrides, or a
/// dimensionless pair.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// grw1986, adler2007, nucleon or macro_1g.
    #[arg(long, conflicts_with = "config")]
    pub preset: Option<Preset>,
    /// `key = value` file with keys preset, lambda_rate, r_c, v_eta, mass.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Jump rate, 1/s.
    #[arg(long)]
    pub lambda_rate: Option<f64>,
    /// Localization length, m.
    #[arg(long)]
    pub r_c: Option<f64>,
    /// Dissipation velocity, m/s (`inf` for k = 0).
    #[arg(long)]
    pub v_eta: Option<f64>,
    /// Mass, kg.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Dissipation parameter; requires --eps-hat and replaces all SI inputs.
    #[arg(long, requires = "eps_hat", conflicts_with_all = ["preset", "config", "lambda_rate", "r_c", "v_eta", "mass"])]
    pub k: Option<f64>,
    /// Dimensionless spreading rate ħ/(M λ r_c²).
    #[arg(long, requires = "k")]
    pub eps_hat: Option<f64>,
    /// Units of inputs and outputs.
    #[arg(long, value_enum, default_value = "nondim")]
    pub units: Units,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Primary output file; stdout when absent. A manifest is written next
    /// to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Explicit manifest path.
    #[arg(long)]
    pub manifest_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// First time; defaults to 0 (linear) or t_stop·1e-6 (log).
    #[arg(long)]
    pub t_start: Option<f64>,
    #[arg(long, default_value_t = 20.0)]
    pub t_stop: f64,
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    /// Defaults to log for microscopic presets and linear otherwise.
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
}

/// Initial Gaussian `exp(-(x-α)²/(2γ) + iβx/ħ)`, in the selected units.
#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    /// Width parameter; defaults to r_c².
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma_im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowArg {
    Schrodinger,
    JumpsOnly,
}

#[derive(Debug, Args)]
pub struct ParamsCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnsembleCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1000)]
    pub n_traj: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "schrodinger")]
    pub flow: FlowArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VarianceCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Initial width parameter; defaults to r_c².
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma_im: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1000)]
    pub n_traj: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "schrodinger")]
    pub flow: FlowArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    MeanP,
    MeanH,
    VarXRho,
    ExactMoments,
    Chi,
    ChiMoments,
    Asymptotic,
    MomentumTransfer,
    Collisional,
}

#[derive(Debug, Args)]
pub struct OracleCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum)]
    pub kind: OracleKind,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Position-conjugate argument of χ (dimensionless units only).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub nu: f64,
    /// Momentum-conjugate argument of χ (dimensionless units only).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GridBornCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    /// |c₊|².
    #[arg(long, default_value_t = 0.5)]
    pub weight: f64,
    /// Peak offset; defaults to 10 r_c.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Peak width parameter; defaults to 0.01 r_c².
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 4096)]
    pub n_grid: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("what").required(true).args(["body", "two_particle"]))]
pub struct AmplifyCmd {
    #[command(flatten)]
    pub params: ParamArgs,
    /// JSON body spec: {"particles": [{"mass", "lambda", "count"}], "rigid"}.
    #[arg(long, conflicts_with = "two_particle")]
    pub body: Option<PathBuf>,
    /// Tabulate two-particle jump means against the jump centre as CSV.
    #[arg(long)]
    pub two_particle: bool,
    /// Centre-of-mass width parameter; defaults to 1e-3 r_c².
    #[arg(long)]
    pub gamma_cm: Option<f64>,
    /// Relative-coordinate width parameter; defaults to 1e-3 r_c².
    #[arg(long)]
    pub gamma_rel: Option<f64>,
    /// Relative-coordinate centre; defaults to r_c.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_rel: Option<f64>,
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Panel {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Args)]
pub struct Fig2Cmd {
    #[arg(long, value_enum)]
    pub panel: Panel,
    #[arg(long, default_value_t = 100_000)]
    pub n_traj: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 41)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "nondim")]
    pub units: Units,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RunCmd {
    /// Manifest written by an earlier run.
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}
