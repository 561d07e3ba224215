//! Named experiment presets and the machinery that runs, calibrates and
//! sweeps them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{enumerate_sector, BasisState, HilbertSpace};
use crate::error::{Error, Result};
use crate::evolve::{evolve, IntegratorConfig, StateVector, TimeSeries};
use crate::hamiltonian::{build_blocks, HamiltonianBlocks};
use crate::observables::{reduce_to_photons, summarize, RunSummary, SummaryRequest};
use crate::system::SystemSpec;

pub mod calibrate;
pub mod distill;
pub mod overrides;
pub mod registry;
pub mod sweep;

pub use calibrate::{calibrate_bell_time, calibrate_plateau, Calibration};
pub use distill::{run_distillation, DistillationReport};
pub use overrides::apply_override;
pub use registry::{get, names};
pub use sweep::{sweep, sweep_detuning, tune_w_coupling, SweepRow};

/// One labelled amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub label: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl Term {
    pub fn new(label: &str, a: Complex64) -> Self {
        Term {
            label: label.to_string(),
            re: a.re,
            im: a.im,
        }
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn pairs(terms: &[Term]) -> Vec<(String, Complex64)> {
    terms.iter().map(|t| (t.label.clone(), t.amplitude())).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    #[default]
    None,
    /// Pure photonic target; absorber parts of the labels are ignored.
    Pure { terms: Vec<Term> },
    /// Three-waveguide W state with free phases.
    W,
}

/// Plateau search that balances the final populations of two states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSpec {
    pub first: String,
    pub second: String,
    /// Plateau search window `[lo, hi]`.
    pub window: [f64; 2],
    #[serde(default = "default_balance_tolerance")]
    pub tolerance: f64,
}

fn default_balance_tolerance() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub system: SystemSpec,
    /// Initial superposition; every term must lie in one charge sector.
    pub initial: Vec<Term>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub tracked: Vec<String>,
    #[serde(default)]
    pub target: Target,
    /// Pair of states whose exchange oscillation is analysed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oscillation: Option<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationSpec>,
    /// Upper bounds on numeric summary fields, keyed by field name.
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
}

/// Everything derived from a scenario before integration.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub space: HilbertSpace,
    pub blocks: HamiltonianBlocks,
    pub psi0: StateVector,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub series: TimeSeries,
    pub summary: RunSummary,
    pub space: HilbertSpace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCheck {
    pub field: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Excitation charge shared by every initial term.
    pub fn charge(&self) -> Result<u32> {
        let mut charges = self
            .initial
            .iter()
            .map(|t| BasisState::parse(&t.label).map(|s| s.charge()));
        let first = charges
            .next()
            .ok_or_else(|| Error::InvalidSystem("scenario has no initial terms".into()))??;
        for c in charges {
            if c? != first {
                return Err(Error::InvalidSystem(
                    "initial terms span more than one charge sector".into(),
                ));
            }
        }
        Ok(first)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.integrator.validate()?;
        self.charge()?;
        Ok(())
    }

    pub fn prepare(&self) -> Result<Prepared> {
        self.validate()?;
        let space = enumerate_sector(&self.system, self.charge()?)?;
        let blocks = build_blocks(&self.system, &space)?;
        let psi0 = StateVector::from_terms(&space, &pairs(&self.initial))?;
        for l in &self.tracked {
            space.index_of_label(l)?;
        }
        Ok(Prepared { space, blocks, psi0 })
    }

    /// Same scenario with a new θ plateau length.
    pub fn with_plateau(&self, plateau: f64) -> Self {
        let mut s = self.clone();
        s.system.ramp = s.system.ramp.with_theta_plateau(plateau);
        s
    }

    pub fn plateau(&self) -> f64 {
        self.system.ramp.theta_max
    }

    pub fn target_terms(&self) -> Option<Vec<(String, Complex64)>> {
        match &self.target {
            Target::Pure { terms } => Some(pairs(terms)),
            _ => None,
        }
    }

    pub fn run(&self) -> Result<RunOutput> {
        let prepared = self.prepare()?;
        self.run_prepared(prepared)
    }

    pub fn run_prepared(&self, prepared: Prepared) -> Result<RunOutput> {
        let Prepared { space, blocks, psi0 } = prepared;
        let series = evolve(&self.system, &blocks, &space, &psi0, &self.integrator)?;
        let summary = self.summarize(&series, &space)?;
        Ok(RunOutput {
            series,
            summary,
            space,
        })
    }

    pub fn summarize(&self, series: &TimeSeries, space: &HilbertSpace) -> Result<RunSummary> {
        let target = self.target_terms();
        let req = SummaryRequest {
            scenario: &self.name,
            tracked: &self.tracked,
            target: target.as_deref(),
            w_state: matches!(self.target, Target::W),
            oscillation: self.oscillation.as_ref().map(|[a, b]| (a.as_str(), b.as_str())),
        };
        summarize(series, space, &req)
    }

    /// Compare summary fields against the configured upper bounds.
    pub fn check_thresholds(&self, summary: &RunSummary) -> Result<Vec<ThresholdCheck>> {
        let value = serde_json::to_value(summary)?;
        self.thresholds
            .iter()
            .map(|(field, &limit)| {
                let v = value.get(field).and_then(|v| v.as_f64()).ok_or_else(|| Error::InvalidOverride {
                    key: format!("thresholds.{field}"),
                    reason: "not a numeric summary field".into(),
                })?;
                Ok(ThresholdCheck {
                    field: field.clone(),
                    value: v,
                    limit,
                    pass: v <= limit,
                })
            })
            .collect()
    }
}

/// Fidelity of every recorded state with a pure photonic target.
pub fn fidelity_trace(series: &TimeSeries, space: &HilbertSpace, target: &[(String, Complex64)]) -> Result<Vec<f64>> {
    let photonic: Vec<(String, Complex64)> = target
        .iter()
        .map(|(l, a)| (l.split('|').next().unwrap_or_default().to_string(), *a))
        .collect();
    series
        .states
        .iter()
        .map(|psi| {
            let rho = reduce_to_photons(psi, space)?;
            crate::observables::fidelity(&rho.target(&photonic)?, &rho.rho)
        })
        .collect()
}

/// Run a registered scenario by name.
pub fn run(name: &str) -> Result<RunOutput> {
    get(name)?.run()
}
