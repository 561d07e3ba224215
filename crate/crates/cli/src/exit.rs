//! Process exit codes and the JSON error report written to stderr.

use serde::Serialize;
use zeno_core::Error;

pub const OK: u8 = 0;
pub const USAGE: u8 = 2;
pub const UNKNOWN_SCENARIO: u8 = 3;
pub const INVALID_OVERRIDE: u8 = 4;
pub const CALIBRATION: u8 = 5;
pub const INTEGRATION: u8 = 6;
pub const IO: u8 = 7;
pub const INVALID_CONFIG: u8 = 8;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            kind: "usage",
            message: message.into(),
        }
    }

    pub fn io(context: &str, e: std::io::Error) -> Self {
        Failure {
            code: IO,
            kind: "io",
            message: format!("{context}: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::UnknownScenario(_) => (UNKNOWN_SCENARIO, "unknown_scenario"),
            Error::InvalidOverride { .. } => (INVALID_OVERRIDE, "invalid_override"),
            Error::Calibration(_) => (CALIBRATION, "calibration"),
            Error::NormDrift { .. } | Error::InvalidIntegrator(_) => (INTEGRATION, "integration"),
            Error::Io(_) | Error::Csv(_) => (IO, "io"),
            _ => (INVALID_CONFIG, "invalid_config"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    error: &'a str,
    message: &'a str,
    exit_code: u8,
}

impl Failure {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&Report {
            error: self.kind,
            message: &self.message,
            exit_code: self.code,
        })
        .unwrap_or_else(|_| format!("{{\"error\":\"{}\",\"exit_code\":{}}}", self.kind, self.code))
    }
}
