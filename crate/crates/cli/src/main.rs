// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! `dgrw` command-line front end.
//!
//! Exit status 0 on success, 1 for output I/O failures, 2 for invalid
//! configuration, 3 for grid flags and 4 for quadrature or fixed-point
//! failures. Errors are reported on stderr as one JSON object.

mod args;
mod config;
mod error;
mod exec;

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use dgrw_core::io::RunManifest;

use crate::args::{Cli, Command};
use crate::config::{Outputs, RunConfig};
use crate::error::{Failure, EXIT_CONFIG};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure { kind: "usage", code: EXIT_CONFIG, message: e.to_string().trim_end().to_owned() };
            eprintln!("{}", f.to_json());
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::config("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::config(format!("thread pool: {e}")))?;
    }
    let cfg = match &cli.command {
        Command::Params(c) => config::params_config(&c.params, &c.output)?,
        Command::Ensemble(c) => config::ensemble_config(c)?,
        Command::Variance(c) => config::variance_config(c)?,
        Command::Oracle(c) => config::oracle_config(c)?,
        Command::GridBorn(c) => config::grid_born_config(c)?,
        Command::Amplify(c) => config::amplify_config(c)?,
        Command::Fig2(c) => config::fig2_config(c)?,
        Command::Run(c) => replay_config(&c.manifest, Outputs::from_args(&c.output))?,
    };
    let start = Instant::now();
    let artifact = exec::execute(&cfg)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    match &cfg.outputs.out {
        Some(path) => fs::write(path, &artifact.bytes)
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().lock().write_all(&artifact.bytes).map_err(|e| Failure::io(format!("stdout: {e}")))?,
    }
    if let Some(path) = cfg.outputs.manifest_path() {
        let manifest = RunManifest {
            params: cfg.params,
            derived: cfg.params.derive()?,
            seed: artifact.seed,
            n_traj: artifact.n_traj,
            t_grid: artifact.t_grid,
            git_rev: git_rev(),
            wall_seconds,
            config: Some(serde_json::to_string(&cfg).expect("run configs serialize")),
        };
        fs::write(&path, manifest.to_json()? + "\n")
            .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Loads the configuration recorded in a manifest. Output paths given on
/// the command line replace the recorded ones.
fn replay_config(path: &std::path::Path, outputs: Outputs) -> Result<RunConfig, Failure> {
    let manifest = RunManifest::from_json(&config::read_input(path)?)
        .map_err(|e| Failure::config(format!("manifest {}: {e}", path.display())))?;
    let text = manifest.config.ok_or_else(|| Failure::config("manifest records no run configuration"))?;
    let mut cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| Failure::config(format!("manifest run configuration: {e}")))?;
    if cfg.params != manifest.params {
        return Err(Failure::config("manifest parameters disagree with its run configuration"));
    }
    if outputs.out.is_some() || outputs.manifest_out.is_some() {
        cfg.outputs = outputs;
    }
    Ok(cfg)
}

fn git_rev() -> Option<String> {
    let out = std::process::Command::new("git").args(["rev-parse", "HEAD"]).output().ok()?;
    out.status.success().then(|| String::from_utf8_lossy(&out.stdout).trim().to_owned())
}
