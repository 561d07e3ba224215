//! `key=value` edits addressed by dotted paths into the scenario document.
//!
//! Short aliases:
//!
//! | alias                 | path                                  |
//! |-----------------------|---------------------------------------|
//! | `theta_max`, `theta`  | `system.theta_max`                    |
//! | `lambda_max`, `lambda`| `system.lambda_max`                   |
//! | `detuning`, `delta`   | `system.detuning`                     |
//! | `omega`, `omega0`     | `system.omega`, `system.omega0`       |
//! | `frame`               | `system.frame`                        |
//! | `dt`, `stride`        | `integrator.dt`, `integrator.stride`  |
//! | `plateau`             | θ plateau, keeping the guard intervals |
//! | `omega_r`             | `system.detuning = omega_r − omega`   |

use serde_json::Value;

use super::Scenario;
use crate::error::{Error, Result};

fn resolve(key: &str) -> &str {
    match key {
        "theta_max" | "theta" => "system.theta_max",
        "lambda_max" | "lambda" => "system.lambda_max",
        "detuning" | "delta" => "system.detuning",
        "omega" => "system.omega",
        "omega0" => "system.omega0",
        "frame" => "system.frame",
        "photon_cap" => "system.photon_cap",
        "dt" => "integrator.dt",
        "stride" => "integrator.stride",
        "step_ratio" => "integrator.step_ratio",
        "drift_tolerance" => "integrator.drift_tolerance",
        other => other,
    }
}

fn invalid(key: &str, reason: impl Into<String>) -> Error {
    Error::InvalidOverride {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn parse_number(key: &str, raw: &str) -> Result<f64> {
    raw.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| invalid(key, format!("expected a number, got {raw:?}")))
}

/// Apply one override. Values are parsed as JSON, falling back to a bare
/// string.
pub fn apply_override(scenario: &mut Scenario, key: &str, raw: &str) -> Result<()> {
    match key {
        "plateau" | "theta_plateau" => {
            let v = parse_number(key, raw)?;
            let next = scenario.with_plateau(v);
            next.system.validate().map_err(|e| invalid(key, e.to_string()))?;
            *scenario = next;
            return Ok(());
        }
        "omega_r" => {
            let v = parse_number(key, raw)?;
            scenario.system.detuning = v - scenario.system.omega;
            return Ok(());
        }
        _ => {}
    }
    let path = resolve(key);
    let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut doc = serde_json::to_value(&*scenario).map_err(|e| invalid(key, e.to_string()))?;

    let mut parts: Vec<&str> = path.split('.').collect();
    let leaf = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| invalid(key, "empty key"))?;
    let mut node = &mut doc;
    for part in parts {
        node = match node {
            Value::Object(map) => map.get_mut(part),
            Value::Array(items) => part.parse::<usize>().ok().and_then(move |i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| invalid(key, format!("no field {part:?} on the path")))?;
    }
    match node {
        Value::Object(map) => {
            map.insert(leaf.to_string(), value);
        }
        Value::Array(items) => {
            let slot = leaf
                .parse::<usize>()
                .ok()
                .and_then(|i| items.get_mut(i))
                .ok_or_else(|| invalid(key, format!("index {leaf:?} out of range")))?;
            *slot = value;
        }
        _ => return Err(invalid(key, "path does not end in an object or array")),
    }
    let updated: Scenario = serde_json::from_value(doc).map_err(|e| invalid(key, e.to_string()))?;
    updated.validate().map_err(|e| invalid(key, e.to_string()))?;
    *scenario = updated;
    Ok(())
}

/// Apply a list of `key=value` strings in order.
pub fn apply_all<S: AsRef<str>>(scenario: &mut Scenario, assignments: &[S]) -> Result<()> {
    for a in assignments {
        let a = a.as_ref();
        let (k, v) = a
            .split_once('=')
            .ok_or_else(|| invalid(a, "expected key=value"))?;
        apply_override(scenario, k.trim(), v.trim())?;
    }
    Ok(())
}
