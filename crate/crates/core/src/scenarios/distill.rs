use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{registry, Scenario, Term};
use crate::error::{Error, Result};
use crate::observables::{OscillationStats, RunSummary};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistillationReport {
    pub summary: RunSummary,
    pub oscillation: OscillationStats,
}

/// Evolve `a|R,L⟩ + b·e^{iφ}|L,R⟩` under the extended two-waveguide
/// configuration and report the exchange oscillation.
pub fn run_distillation(a: f64, b: f64, phi: f64) -> Result<DistillationReport> {
    run_distillation_on(&registry::get("fig4b")?, a, b, phi)
}

pub fn run_distillation_on(base: &Scenario, a: f64, b: f64, phi: f64) -> Result<DistillationReport> {
    let norm = a * a + b * b;
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    let [first, second] = base
        .oscillation
        .clone()
        .ok_or_else(|| Error::InvalidSystem("base scenario tracks no oscillation pair".into()))?;
    let mut s = base.clone();
    s.initial = vec![
        Term::new(&first, Complex64::new(a, 0.0)),
        Term::new(&second, Complex64::from_polar(b, phi)),
    ];
    let summary = s.run()?.summary;
    let oscillation = summary.oscillation.clone().expect("oscillation pair is set");
    Ok(DistillationReport { summary, oscillation })
}
