// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Output formats: CSV time series and JSON run manifests.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::{DerivedParams, ModelParams, Quantity, UnitSystem};
use crate::trajectory::EnsembleSeries;

/// Serde adapter for `f64` fields that may be infinite or NaN.
///
/// JSON has no literal for non-finite numbers, so those are written as the
/// strings `"inf"`, `"-inf"` and `"nan"`. Both numbers and strings are
/// accepted on input.
pub mod extended_f64 {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(ExtendedVisitor)
    }

    struct ExtendedVisitor;

    impl Visitor<'_> for ExtendedVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => other.parse().map_err(|_| E::invalid_value(de::Unexpected::Str(other), &self)),
            }
        }
    }
}

/// Conversion applied to dimensionless simulation output before writing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutputUnits {
    Nondimensional,
    /// Multiply by the scales of this system. Energies use its
    /// `model_energy_scale`.
    Si(UnitSystem),
}

impl OutputUnits {
    fn factor(&self, kind: Quantity) -> f64 {
        match self {
            OutputUnits::Nondimensional => 1.0,
            OutputUnits::Si(u) if kind == Quantity::Energy => u.model_energy_scale(),
            OutputUnits::Si(u) => u.scale(kind),
        }
    }
}

/// Writes `t,observable,estimate,std_error` rows, time-major, with `NA` for
/// missing standard errors. Formatting is deterministic so identical runs
/// produce identical bytes.
pub fn write_series_csv<W: Write>(mut w: W, series: &EnsembleSeries, units: OutputUnits) -> Result<()> {
    writeln!(w, "t,observable,estimate,std_error")?;
    let tf = units.factor(Quantity::Time);
    for (i, &t) in series.t_grid.iter().enumerate() {
        for s in &series.series {
            let f = units.factor(s.observable.quantity());
            let se = match s.std_error[i] {
                Some(e) => format!("{:e}", e * f),
                None => "NA".to_owned(),
            };
            writeln!(w, "{:e},{},{:e},{}", t * tf, s.observable.name(), s.estimate[i] * f, se)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub params: ModelParams,
    pub derived: DerivedParams,
    pub seed: u64,
    pub n_traj: usize,
    pub t_grid: Vec<f64>,
    pub git_rev: Option<String>,
    pub wall_seconds: f64,
    /// Serialized run configuration, if the producer recorded one.
    pub config: Option<String>,
}

impl RunManifest {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
