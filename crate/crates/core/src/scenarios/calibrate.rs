//! Search for the θ plateau that balances two final populations.
//!
//! The ramp-down propagator `U_↓` does not depend on the plateau length, so
//! the final amplitude `⟨s|U_↓|φ(T)⟩` equals `⟨r_s|φ(T)⟩` with the readout
//! `r_s = U_↓†|s⟩`, obtained once by integrating `|s⟩` backwards through
//! the ramp-down. A single long plateau run then scores every plateau length.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CalibrationSpec, Scenario};
use crate::error::{Error, Result};
use crate::evolve::{propagate, StateVector};

const MAX_REFINEMENTS: usize = 40;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Calibration {
    pub scenario: Scenario,
    pub plateau: f64,
    /// `P(first) − P(second)` at the end of the verified run.
    pub imbalance: f64,
    /// Full verification runs performed.
    pub full_runs: usize,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Balance metric `P(first) − P(second)` as a function of plateau length,
/// sampled on the integrator grid.
pub fn scan_balance(base: &Scenario, spec: &CalibrationSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let [lo, hi] = spec.window;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Calibration(format!("invalid plateau window [{lo}, {hi}]")));
    }
    let long = base.with_plateau(hi);
    let prep = long.prepare()?;
    let sys = &long.system;
    let total = sys.total_time();
    let dt = long.integrator.plan(prep.blocks.norm_bound(sys), total)?.dt;
    let (plateau_start, plateau_end) = sys.ramp.theta_plateau();
    let tol = long.integrator.drift_tolerance;
    let steps = |span: f64| ((span.abs() / dt).ceil() as usize).max(1);

    let mut readouts = Vec::new();
    for label in [&spec.first, &spec.second] {
        let mut r = StateVector::basis(&prep.space, label)?.amplitudes;
        propagate(sys, &prep.blocks, &mut r, total, plateau_end, steps(total - plateau_end), tol, |_, _, _| {})?;
        readouts.push(r);
    }

    let mut psi = prep.psi0.amplitudes.clone();
    propagate(sys, &prep.blocks, &mut psi, 0.0, plateau_start, steps(plateau_start), tol, |_, _, _| {})?;
    let n = steps(hi);
    let h = hi / n as f64;
    let mut plateaus = Vec::with_capacity(n + 1);
    let mut metric = Vec::with_capacity(n + 1);
    propagate(sys, &prep.blocks, &mut psi, plateau_start, plateau_end, n, tol, |k, _, state| {
        plateaus.push(k as f64 * h);
        metric.push(dot(&readouts[0], state).norm_sqr() - dot(&readouts[1], state).norm_sqr());
    })?;
    Ok((plateaus, metric))
}

fn full_imbalance(base: &Scenario, spec: &CalibrationSpec, plateau: f64) -> Result<f64> {
    let s = base.with_plateau(plateau);
    let out = s.run()?;
    let psi = out.series.final_state();
    Ok(psi.amplitude(&out.space, &spec.first)?.norm_sqr() - psi.amplitude(&out.space, &spec.second)?.norm_sqr())
}

/// First plateau in the window at which the final populations of
/// `spec.first` and `spec.second` cross, verified by full runs to
/// `|P(first) − P(second)| < spec.tolerance`.
pub fn calibrate_plateau(base: &Scenario, spec: &CalibrationSpec) -> Result<Calibration> {
    let (plateaus, metric) = scan_balance(base, spec)?;
    let lo = spec.window[0];
    let k = (1..metric.len())
        .find(|&k| plateaus[k] > lo && (metric[k - 1] < 0.0) != (metric[k] < 0.0))
        .ok_or_else(|| {
            Error::Calibration(format!(
                "P({}) − P({}) never changes sign for plateaus in [{}, {}]; \
                 bunching may not be suppressed (λ/θ too small) or the window is too short",
                spec.first, spec.second, spec.window[0], spec.window[1]
            ))
        })?;

    let (mut a, mut b) = (plateaus[k - 1].max(lo), plateaus[k]);
    let (mut fa, mut fb) = (metric[k - 1], metric[k]);
    let mut guess = a + (b - a) * fa / (fa - fb);
    let mut runs = 0;
    for _ in 0..MAX_REFINEMENTS {
        let f = full_imbalance(base, spec, guess)?;
        runs += 1;
        if f.abs() < spec.tolerance {
            return Ok(Calibration {
                scenario: base.with_plateau(guess),
                plateau: guess,
                imbalance: f,
                full_runs: runs,
            });
        }
        if (f < 0.0) == (fa < 0.0) {
            a = guess;
            fa = f;
        } else {
            b = guess;
            fb = f;
        }
        if (fa < 0.0) == (fb < 0.0) {
            // Bracket no longer straddles the root.
            let w = b - a;
            a = (a - w).max(lo);
            b += w;
            fa = full_imbalance(base, spec, a)?;
            fb = full_imbalance(base, spec, b)?;
            runs += 2;
        }
        guess = if (fa - fb).abs() > 0.0 {
            (a + (b - a) * fa / (fa - fb)).clamp(a + 0.01 * (b - a), b - 0.01 * (b - a))
        } else {
            0.5 * (a + b)
        };
    }
    Err(Error::Calibration(format!(
        "refinement did not reach |P({}) − P({})| < {} after {runs} runs",
        spec.first, spec.second, spec.tolerance
    )))
}

/// Plateau that leaves a two-waveguide run in an equal superposition of the
/// two anti-bunched states.
pub fn calibrate_bell_time(base: &Scenario, window: [f64; 2]) -> Result<Calibration> {
    let mut spec = base.calibration.clone().unwrap_or(CalibrationSpec {
        first: String::new(),
        second: String::new(),
        window,
        tolerance: 1e-3,
    });
    spec.window = window;
    if spec.first.is_empty() {
        let g = vec!["G"; base.system.absorbers.iter().flatten().count()].join(".");
        spec.first = format!("R.L|{g}");
        spec.second = format!("L.R|{g}");
    }
    calibrate_plateau(base, &spec)
}
