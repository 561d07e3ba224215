//! Fixed-step RK4 integration of `dψ/dt = −i·H(t)·ψ`.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::HilbertSpace;
use crate::error::{Error, Result};
use crate::hamiltonian::{couplings_at, HamiltonianBlocks};
use crate::system::SystemSpec;

const MINUS_I: Complex64 = Complex64 { re: 0.0, im: -1.0 };

/// Upper limit on `dt·‖H‖` accepted at run start.
pub const MAX_STEP_RATIO: f64 = 0.1;

/// Records kept when the stride is left to the integrator.
const TARGET_RECORDS: usize = 2000;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        StateVector {
            amplitudes,
            time: 0.0,
        }
    }

    /// Single basis state by label.
    pub fn basis(space: &HilbertSpace, label: &str) -> Result<Self> {
        Self::from_terms(space, &[(label, Complex64::new(1.0, 0.0))])
    }

    /// Superposition of labelled basis states; amplitudes are taken as given.
    pub fn from_terms<S: AsRef<str>>(space: &HilbertSpace, terms: &[(S, Complex64)]) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); space.dim()];
        for (label, a) in terms {
            amps[space.index_of_label(label.as_ref())?] += a;
        }
        Ok(Self::new(amps))
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    pub fn amplitude(&self, space: &HilbertSpace, label: &str) -> Result<Complex64> {
        Ok(self.amplitudes[space.index_of_label(label)?])
    }
}

pub fn norm_sqr(psi: &[Complex64]) -> f64 {
    psi.iter().map(|a| a.norm_sqr()).sum()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Step size; derived from `step_ratio` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub method: Method,
    /// Target `dt·‖H‖` when `dt` is absent.
    pub step_ratio: f64,
    pub drift_tolerance: f64,
    /// Record every k-th step; chosen automatically when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<usize>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: None,
            method: Method::Rk4,
            step_ratio: 0.05,
            drift_tolerance: 1e-8,
            stride: None,
        }
    }
}

/// Step plan resolved against a particular Hamiltonian and duration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPlan {
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if dt.is_nan() || dt <= 0.0 || !dt.is_finite() {
                return Err(Error::InvalidIntegrator(format!("dt must be > 0, got {dt}")));
            }
        }
        if !(self.step_ratio > 0.0 && self.step_ratio <= MAX_STEP_RATIO) {
            return Err(Error::InvalidIntegrator(format!(
                "step_ratio must lie in (0, {MAX_STEP_RATIO}], got {}",
                self.step_ratio
            )));
        }
        if self.drift_tolerance.is_nan() || self.drift_tolerance <= 0.0 {
            return Err(Error::InvalidIntegrator("drift_tolerance must be > 0".into()));
        }
        if self.stride == Some(0) {
            return Err(Error::InvalidIntegrator("stride must be ≥ 1".into()));
        }
        Ok(())
    }

    /// Resolve the step size and stride for a run of length `duration`.
    /// The step is shrunk so an integer number of steps spans the run.
    pub fn plan(&self, norm_bound: f64, duration: f64) -> Result<StepPlan> {
        self.validate()?;
        let duration = duration.abs();
        let bound = norm_bound.max(f64::MIN_POSITIVE);
        let requested = self.dt.unwrap_or(self.step_ratio / bound);
        if requested * norm_bound > MAX_STEP_RATIO * (1.0 + 1e-12) {
            return Err(Error::InvalidIntegrator(format!(
                "dt·‖H‖ = {:.3} exceeds {MAX_STEP_RATIO} (dt = {requested:.3e}, ‖H‖ ≤ {norm_bound:.3e})",
                requested * norm_bound
            )));
        }
        let steps = ((duration / requested).ceil() as usize).max(1);
        let dt = if duration > 0.0 { duration / steps as f64 } else { 0.0 };
        let stride = self.stride.unwrap_or_else(|| steps.div_ceil(TARGET_RECORDS).max(1));
        Ok(StepPlan { dt, steps, stride })
    }
}

/// Recorded trajectory.
#[derive(Clone, Debug)]
pub struct TimeSeries {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub dt: f64,
    pub steps: usize,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> StateVector {
        StateVector {
            amplitudes: self.states.last().cloned().unwrap_or_default(),
            time: self.times.last().copied().unwrap_or(0.0),
        }
    }

    pub fn column(&self, index: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[index].norm_sqr()).collect()
    }

    /// CSV with a `time` column followed by one probability column per
    /// basis label.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["time".to_string()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let mut row = vec![format!("{t:.12e}")];
            row.extend(s.iter().map(|a| format!("{:.12e}", a.norm_sqr())));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Maximum of `|‖ψ‖² − 1|` over the recorded states.
pub fn norm_drift(series: &TimeSeries) -> f64 {
    series
        .states
        .iter()
        .map(|s| (norm_sqr(s) - 1.0).abs())
        .fold(0.0, f64::max)
}

fn check_initial(space: &HilbertSpace, psi0: &StateVector, tolerance: f64) -> Result<()> {
    if psi0.amplitudes.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: psi0.amplitudes.len(),
        });
    }
    let n = psi0.norm_sqr();
    if (n - 1.0).abs() > tolerance {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// Integrate from `ψ₀.time` to the end of the switching schedule.
pub fn evolve(
    spec: &SystemSpec,
    blocks: &HamiltonianBlocks,
    space: &HilbertSpace,
    psi0: &StateVector,
    cfg: &IntegratorConfig,
) -> Result<TimeSeries> {
    check_initial(space, psi0, cfg.drift_tolerance)?;
    let plan = cfg.plan(blocks.norm_bound(spec), spec.total_time() - psi0.time)?;
    let mut series = TimeSeries {
        labels: space.labels(),
        times: Vec::with_capacity(plan.steps / plan.stride + 2),
        states: Vec::with_capacity(plan.steps / plan.stride + 2),
        dt: plan.dt,
        steps: plan.steps,
    };
    let mut psi = psi0.amplitudes.clone();
    propagate(
        spec,
        blocks,
        &mut psi,
        psi0.time,
        spec.total_time(),
        plan.steps,
        cfg.drift_tolerance,
        |k, t, state| {
            if k % plan.stride == 0 || k == plan.steps {
                series.times.push(t);
                series.states.push(state.to_vec());
            }
        },
    )?;
    Ok(series)
}

/// Integrate `psi` in place from `t0` to `t1` (either direction) in `steps`
/// equal RK4 steps, calling `observe(k, t, ψ)` at every grid point including
/// both ends. A negative interval applies the inverse propagator.
#[allow(clippy::too_many_arguments)]
pub fn propagate<F>(
    spec: &SystemSpec,
    blocks: &HamiltonianBlocks,
    psi: &mut [Complex64],
    t0: f64,
    t1: f64,
    steps: usize,
    drift_tolerance: f64,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(usize, f64, &[Complex64]),
{
    let n = blocks.dim();
    if psi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: psi.len(),
        });
    }
    let norm0 = norm_sqr(psi);
    let h = (t1 - t0) / steps.max(1) as f64;
    let mut rk = Rk4Scratch::new(n);
    observe(0, t0, psi);
    for k in 1..=steps {
        let t = t0 + (k - 1) as f64 * h;
        rk.step(spec, blocks, psi, t, h);
        let now = t0 + k as f64 * h;
        let drift = (norm_sqr(psi) - norm0).abs();
        if drift > drift_tolerance || !drift.is_finite() {
            return Err(Error::NormDrift {
                drift,
                tolerance: drift_tolerance,
                time: now,
                dt: h.abs(),
            });
        }
        observe(k, now, psi);
    }
    Ok(())
}

struct Rk4Scratch {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4Scratch {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Rk4Scratch {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }

    fn deriv(spec: &SystemSpec, blocks: &HamiltonianBlocks, t: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let (theta, lambda) = couplings_at(spec, t);
        blocks.apply(theta, lambda, psi, out);
        for o in out.iter_mut() {
            *o *= MINUS_I;
        }
    }

    fn step(&mut self, spec: &SystemSpec, blocks: &HamiltonianBlocks, psi: &mut [Complex64], t: f64, h: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        Self::deriv(spec, blocks, t, psi, k1);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k1[i] * (0.5 * h);
        }
        Self::deriv(spec, blocks, t + 0.5 * h, tmp, k2);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k2[i] * (0.5 * h);
        }
        Self::deriv(spec, blocks, t + 0.5 * h, tmp, k3);
        for i in 0..psi.len() {
            tmp[i] = psi[i] + k3[i] * h;
        }
        Self::deriv(spec, blocks, t + h, tmp, k4);
        let w = h / 6.0;
        for i in 0..psi.len() {
            psi[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }
}
