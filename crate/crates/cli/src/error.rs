// Copyright 2026 The dgrw Authors
// SPDX-License-Identifier: Apache-2.0

//! Exit statuses and machine-readable error reports.

use dgrw_core::Error;
use serde::Serialize;

pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GRID: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// A failed run, reported on stderr as `{"error": {...}}`.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub kind: &'static str,
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { kind: "config", code: EXIT_CONFIG, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { kind: "io", code: EXIT_IO, message: message.into() }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (kind, code) = match &e {
            Error::Grid(_) => ("grid_flag", EXIT_GRID),
            Error::Quadrature { .. } | Error::FixedPoint { .. } => ("numerical", EXIT_NUMERICAL),
            Error::Io(_) => ("io", EXIT_IO),
            _ => ("config", EXIT_CONFIG),
        };
        Self { kind, code, message: e.to_string() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dgrw_core::GridFlag;

    #[test]
    fn exit_codes_by_error_class() {
        let code = |e: Error| Failure::from(e).code;
        assert_eq!(code(Error::Quadrature { estimate: 1.0, tolerance: 0.1 }), EXIT_NUMERICAL);
        assert_eq!(code(Error::FixedPoint { residual: 1.0, tolerance: 0.1 }), EXIT_NUMERICAL);
        assert_eq!(code(GridFlag::Truncation { mass: 0.1 }.into()), EXIT_GRID);
        assert_eq!(code(Error::InvalidParams("x".into())), EXIT_CONFIG);
        assert_eq!(code(Error::Config { line: 1, msg: "x".into() }), EXIT_CONFIG);
    }

    #[test]
    fn report_is_one_json_object() {
        let v: serde_json::Value = serde_json::from_str(&Failure::config("bad").to_json()).unwrap();
        assert_eq!(v["error"]["code"], EXIT_CONFIG);
        assert_eq!(v["error"]["kind"], "config");
    }
}
