//! One-parameter sweeps over independent runs.

use serde::{Deserialize, Serialize};

use super::{apply_override, calibrate_plateau, Scenario};
use crate::error::{Error, Result};
use crate::observables::{w_state_overlap, RunSummary};
use crate::parallel::{self, Execution};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub summary: RunSummary,
}

/// `samples` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![lo],
        n => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Run `base` once per value of the override `key`.
pub fn sweep(base: &Scenario, key: &str, values: &[f64], exec: Execution) -> Result<Vec<SweepRow>> {
    let rows = parallel::map(exec, values, |&v| -> Result<SweepRow> {
        let mut s = base.clone();
        apply_override(&mut s, key, &format!("{v:?}"))?;
        Ok(SweepRow {
            value: v,
            summary: s.run()?.summary,
        })
    });
    rows.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningRow {
    /// Absorber resonance `ω_R = ω + Δω_R`.
    pub omega_r: f64,
    pub detuning: f64,
    /// Max over time of the probability that the second waveguide holds the
    /// photon.
    pub max_swap: f64,
    /// `1 − max_swap`.
    pub residence: f64,
}

/// Swap suppression of a single photon against the absorber resonance.
pub fn sweep_detuning(base: &Scenario, omega_r: [f64; 2], samples: usize, exec: Execution) -> Result<Vec<DetuningRow>> {
    if base.system.waveguides < 2 {
        return Err(Error::InvalidSystem("detuning sweep needs two waveguides".into()));
    }
    let values = linspace(omega_r[0], omega_r[1], samples);
    let rows = sweep(base, "omega_r", &values, exec)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            let max_swap = r.summary.max_occupation_probability[1];
            DetuningRow {
                omega_r: r.value,
                detuning: r.value - base.system.omega,
                max_swap,
                residence: 1.0 - max_swap,
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WTuningPoint {
    pub lambda: f64,
    pub plateau: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WTuning {
    pub best: WTuningPoint,
    pub scan: Vec<WTuningPoint>,
}

fn w_point(base: &Scenario, lambda: f64) -> Result<WTuningPoint> {
    let spec = base
        .calibration
        .as_ref()
        .ok_or_else(|| Error::Calibration("scenario has no calibration block".into()))?;
    let mut s = base.clone();
    s.system.lambda_max = lambda;
    let cal = calibrate_plateau(&s, spec)?;
    let out = cal.scenario.run()?;
    let w = w_state_overlap(&out.series.final_state().amplitudes, &out.space)?;
    Ok(WTuningPoint {
        lambda,
        plateau: cal.plateau,
        fidelity: w.fidelity,
    })
}

fn score(base: &Scenario, lambda: f64) -> WTuningPoint {
    w_point(base, lambda).unwrap_or(WTuningPoint {
        lambda,
        plateau: f64::NAN,
        fidelity: 0.0,
    })
}

/// Maximize the W fidelity over `λ_max`: a coarse grid, then golden-section
/// refinement around the best grid point. Each point calibrates its own
/// plateau; values of λ without a balance crossing score zero.
pub fn tune_w_coupling(
    base: &Scenario,
    lambda: [f64; 2],
    coarse: usize,
    refinements: usize,
    exec: Execution,
) -> Result<WTuning> {
    let grid = linspace(lambda[0], lambda[1], coarse.max(3));
    let mut scan: Vec<WTuningPoint> = parallel::map(exec, &grid, |&l| score(base, l));
    let best = (0..scan.len())
        .max_by(|&a, &b| scan[a].fidelity.total_cmp(&scan[b].fidelity))
        .filter(|&i| scan[i].fidelity > 0.0)
        .ok_or_else(|| Error::Calibration(format!("no λ in [{}, {}] could be calibrated", lambda[0], lambda[1])))?;
    let step = grid[1] - grid[0];
    let (mut a, mut b) = (scan[best].lambda - step, scan[best].lambda + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut pc = score(base, c);
    let mut pd = score(base, d);
    for _ in 0..refinements {
        if pc.fidelity >= pd.fidelity {
            b = d;
            d = c;
            c = b - g * (b - a);
            scan.push(pd);
            pd = pc;
            pc = score(base, c);
        } else {
            a = c;
            c = d;
            d = a + g * (b - a);
            scan.push(pc);
            pc = pd;
            pd = score(base, d);
        }
    }
    scan.push(pc);
    scan.push(pd);
    scan.retain(|p| p.fidelity > 0.0);
    scan.sort_by(|x, y| x.lambda.total_cmp(&y.lambda));
    let best = scan
        .iter()
        .max_by(|x, y| x.fidelity.total_cmp(&y.fidelity))
        .cloned()
        .expect("scan holds the best grid point");
    Ok(WTuning { best, scan })
}
