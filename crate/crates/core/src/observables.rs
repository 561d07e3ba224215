//! Quantities read off a trajectory: populations, the photonic reduced
//! density matrix, fidelities, relative phases and entanglement measures.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisState, HilbertSpace, Polarization};
use crate::error::{Error, Result};
use crate::evolve::{norm_drift, TimeSeries};

pub const PHASE_FLOOR: f64 = 1e-6;

/// Tolerance on negative eigenvalues before a matrix counts as non-PSD.
pub const PSD_TOLERANCE: f64 = 1e-9;

/// Projection weight below which a W-state fidelity is flagged.
pub const RELIABLE_WEIGHT: f64 = 0.5;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `|amplitude|²` of each tracked state at every record.
pub fn probabilities<S: AsRef<str>>(
    series: &TimeSeries,
    space: &HilbertSpace,
    tracked: &[S],
) -> Result<Vec<Vec<f64>>> {
    tracked
        .iter()
        .map(|l| Ok(series.column(space.index_of_label(l.as_ref())?)))
        .collect()
}

/// Density matrix over photon configurations, absorbers traced out.
#[derive(Clone, Debug)]
pub struct PhotonicDensity {
    /// Photon part of the canonical label, e.g. `R.L`.
    pub labels: Vec<String>,
    pub rho: DMatrix<Complex64>,
}

impl PhotonicDensity {
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownState(label.to_string()))
    }

    /// Pure photonic state from labelled amplitudes, normalized.
    pub fn target<S: AsRef<str>>(&self, terms: &[(S, Complex64)]) -> Result<DVector<Complex64>> {
        let mut v = DVector::from_element(self.labels.len(), ZERO);
        for (label, a) in terms {
            v[self.index_of(label.as_ref())?] += a;
        }
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Ok(v / Complex64::new(n, 0.0))
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }
}

fn photon_label(s: &BasisState) -> String {
    let full = s.label();
    full.split('|').next().unwrap_or_default().to_string()
}

/// Partial trace over all absorber levels.
pub fn reduce_to_photons(psi: &[Complex64], space: &HilbertSpace) -> Result<PhotonicDensity> {
    if psi.len() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            got: psi.len(),
        });
    }
    let mut configs: Vec<&[u8]> = space.states().iter().map(|s| s.occupations.as_slice()).collect();
    configs.sort_unstable();
    configs.dedup();
    let row: HashMap<&[u8], usize> = configs.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let labels = configs
        .iter()
        .map(|c| {
            photon_label(&BasisState {
                occupations: c.to_vec(),
                levels: Vec::new(),
            })
        })
        .collect();

    let mut by_absorber: HashMap<&[_], Vec<(usize, Complex64)>> = HashMap::new();
    for (s, &a) in space.states().iter().zip(psi) {
        by_absorber
            .entry(s.levels.as_slice())
            .or_default()
            .push((row[s.occupations.as_slice()], a));
    }
    let mut rho = DMatrix::from_element(configs.len(), configs.len(), ZERO);
    for terms in by_absorber.values() {
        for &(i, a) in terms {
            for &(j, b) in terms {
                rho[(i, j)] += a * b.conj();
            }
        }
    }
    Ok(PhotonicDensity { labels, rho })
}

/// `⟨ψ|σ|ψ⟩` for a pure target `ψ`.
pub fn fidelity(target: &DVector<Complex64>, sigma: &DMatrix<Complex64>) -> Result<f64> {
    if sigma.nrows() != target.len() || sigma.ncols() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: sigma.nrows(),
            got: target.len(),
        });
    }
    Ok((target.adjoint() * sigma * target)[(0, 0)].re)
}

/// `arg(ψ[s2]) − arg(ψ[s1])` wrapped to `(−π, π]`.
pub fn relative_phase(psi: &[Complex64], space: &HilbertSpace, s1: &str, s2: &str, floor: f64) -> Result<f64> {
    let amp = |label: &str| -> Result<Complex64> {
        let a = psi[space.index_of_label(label)?];
        if a.norm() <= floor {
            return Err(Error::UndefinedPhase {
                state: label.to_string(),
                magnitude: a.norm(),
                floor,
            });
        }
        Ok(a)
    };
    let (a, b) = (amp(s1)?, amp(s2)?);
    Ok(wrap_phase(b.arg() - a.arg()))
}

pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

fn hermitian_sqrt(m: &Matrix4<Complex64>) -> Result<Matrix4<Complex64>> {
    let eig = m.symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPositive(min));
    }
    let d = eig.eigenvalues.map(|v| Complex64::new(v.max(0.0).sqrt(), 0.0));
    Ok(eig.eigenvectors * Matrix4::from_diagonal(&d) * eig.eigenvectors.adjoint())
}

/// Wootters concurrence of a two-qubit density matrix in the basis
/// `|RR⟩, |RL⟩, |LR⟩, |LL⟩`.
pub fn concurrence(rho: &Matrix4<Complex64>) -> Result<f64> {
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let yy = Matrix4::from_fn(|i, j| {
        if i + j == 3 {
            Complex64::new(if i == 0 || i == 3 { -1.0 } else { 1.0 }, 0.0)
        } else {
            ZERO
        }
    });
    let tilde = yy * herm.conjugate() * yy;
    let s = hermitian_sqrt(&herm)?;
    let m = s * tilde * s;
    let m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut lambdas: Vec<f64> = m
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Embedding of the anti-bunched sector (one photon per waveguide, absorbers
/// in `G`) into an n-qubit register. Qubit `i` is the polarization in
/// waveguide `i`, `R ↦ 0` and `L ↦ 1`, waveguide 0 most significant.
#[derive(Clone, Debug)]
pub struct QubitProjection {
    pub qubits: usize,
    /// Space index of each register basis state.
    pub indices: Vec<usize>,
}

impl QubitProjection {
    pub fn new(space: &HilbertSpace) -> Result<Self> {
        let qubits = space.layout().waveguides;
        let sites = space.layout().sites.len();
        let indices = (0..1usize << qubits)
            .map(|k| space.index_of(&register_state(qubits, sites, k)))
            .collect::<Result<_>>()?;
        Ok(QubitProjection { qubits, indices })
    }

    /// Register label of basis index `k`, e.g. `RLR`.
    pub fn label(&self, k: usize) -> String {
        (0..self.qubits)
            .map(|q| if k >> (self.qubits - 1 - q) & 1 == 1 { 'L' } else { 'R' })
            .collect()
    }

    /// Raw projected amplitudes and their total weight.
    pub fn project(&self, psi: &[Complex64]) -> (Vec<Complex64>, f64) {
        let amps: Vec<Complex64> = self.indices.iter().map(|&i| psi[i]).collect();
        let w = amps.iter().map(|a| a.norm_sqr()).sum();
        (amps, w)
    }

    /// Renormalized two-qubit density matrix of the projected state.
    pub fn two_qubit_density(&self, psi: &[Complex64]) -> Result<Matrix4<Complex64>> {
        if self.qubits != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.qubits,
            });
        }
        let (amps, w) = self.project(psi);
        if w == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let scale = 1.0 / w;
        Ok(Matrix4::from_fn(|i, j| amps[i] * amps[j].conj() * scale))
    }
}

/// Register state `k` as a basis state of the full space.
pub fn register_state(qubits: usize, sites: usize, k: usize) -> BasisState {
    let mut occupations = vec![0u8; 2 * qubits];
    for q in 0..qubits {
        let pol = if k >> (qubits - 1 - q) & 1 == 1 {
            Polarization::L
        } else {
            Polarization::R
        };
        occupations[crate::basis::Layout::mode(q, pol)] = 1;
    }
    BasisState {
        occupations,
        levels: vec![crate::basis::Level::G; sites],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WFidelity {
    pub fidelity: f64,
    pub projection_weight: f64,
    pub reliable: bool,
}

/// Overlap with the W state `(e^{iα}|a⟩ + e^{iβ}|b⟩ + e^{iγ}|c⟩)/√3`,
/// maximized over the three phases: `(|a|+|b|+|c|)²/3`.
pub fn w_state_fidelity(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (a.norm() + b.norm() + c.norm()).powi(2) / 3.0
}

/// W fidelity on the one-`L`-photon states `RRL`, `RLR`, `LRR` of a
/// three-waveguide run.
pub fn w_state_overlap(psi: &[Complex64], space: &HilbertSpace) -> Result<WFidelity> {
    let proj = QubitProjection::new(space)?;
    if proj.qubits != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: proj.qubits,
        });
    }
    let (amps, _) = proj.project(psi);
    let (a, b, c) = (amps[0b001], amps[0b010], amps[0b100]);
    let w_weight = a.norm_sqr() + b.norm_sqr() + c.norm_sqr();
    Ok(WFidelity {
        fidelity: w_state_fidelity(a, b, c),
        projection_weight: w_weight,
        reliable: w_weight >= RELIABLE_WEIGHT,
    })
}

/// Oscillation between two populations `p_a` (initially dominant) and `p_b`,
/// measured on the swap fraction `p_b / (p_a + p_b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationStats {
    /// Times at which the swap fraction crosses one half.
    pub crossings: Vec<f64>,
    pub full_oscillations: usize,
    /// Twice the mean spacing between crossings.
    pub period: Option<f64>,
    pub swap_fraction_min: f64,
    pub swap_fraction_max: f64,
    pub first_min: f64,
    pub first_max: f64,
    pub second_min: f64,
    pub second_max: f64,
}

impl OscillationStats {
    pub fn swap_fraction_peak_to_peak(&self) -> f64 {
        self.swap_fraction_max - self.swap_fraction_min
    }

    pub fn second_peak_to_peak(&self) -> f64 {
        self.second_max - self.second_min
    }
}

pub fn oscillation_stats(times: &[f64], p_a: &[f64], p_b: &[f64]) -> OscillationStats {
    let f: Vec<f64> = p_a
        .iter()
        .zip(p_b)
        .map(|(a, b)| if a + b > 0.0 { b / (a + b) } else { 0.5 })
        .collect();
    let mut crossings = Vec::new();
    for k in 1..f.len() {
        let (x, y) = (f[k - 1] - 0.5, f[k] - 0.5);
        if (x < 0.0) != (y < 0.0) {
            let s = x / (x - y);
            crossings.push(times[k - 1] + s * (times[k] - times[k - 1]));
        }
    }
    let period = (crossings.len() >= 2).then(|| {
        2.0 * (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64
    });
    let range = |v: &[f64]| {
        v.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    };
    let (fmin, fmax) = range(&f);
    let (amin, amax) = range(p_a);
    let (bmin, bmax) = range(p_b);
    OscillationStats {
        full_oscillations: crossings.len() / 2,
        crossings,
        period,
        swap_fraction_min: fmin,
        swap_fraction_max: fmax,
        first_min: amin,
        first_max: amax,
        second_min: bmin,
        second_max: bmax,
    }
}

/// Endpoint and whole-run metrics of one trajectory.
#[allow(non_snake_case)]
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub dimension: usize,
    pub final_time: f64,
    pub dt: f64,
    pub steps: usize,
    pub records: usize,
    pub final_probabilities: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_P_RL: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_P_LR: Option<f64>,
    /// Phases of anti-bunched amplitudes relative to the first tracked one,
    /// keyed `"<state>/<reference>"`.
    pub relative_phases: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concurrence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_fidelity: Option<WFidelity>,
    /// Max over time of the summed probability of all bunched states.
    pub max_bunched_probability: f64,
    pub final_bunched_probability: f64,
    /// Per waveguide, max over time of the probability it holds a photon.
    pub max_occupation_probability: Vec<f64>,
    pub final_occupation_probability: Vec<f64>,
    pub norm_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oscillation: Option<OscillationStats>,
}

/// Summed probability of the states selected by `pick` at every record.
pub fn summed_probability(series: &TimeSeries, space: &HilbertSpace, pick: impl Fn(&BasisState) -> bool) -> Vec<f64> {
    let idx: Vec<usize> = (0..space.dim()).filter(|&i| pick(space.state(i))).collect();
    series
        .states
        .iter()
        .map(|s| idx.iter().map(|&i| s[i].norm_sqr()).sum())
        .collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Options controlling which target-dependent metrics are computed.
#[derive(Clone, Debug, Default)]
pub struct SummaryRequest<'a> {
    pub scenario: &'a str,
    pub tracked: &'a [String],
    /// Photonic pure target for the fidelity, as labelled amplitudes.
    pub target: Option<&'a [(String, Complex64)]>,
    pub w_state: bool,
    /// Pair of tracked labels whose oscillation is analysed.
    pub oscillation: Option<(&'a str, &'a str)>,
}

pub fn summarize(series: &TimeSeries, space: &HilbertSpace, req: &SummaryRequest<'_>) -> Result<RunSummary> {
    let last = series.final_state();
    let psi = &last.amplitudes;
    let mut final_probabilities = BTreeMap::new();
    for l in req.tracked {
        final_probabilities.insert(l.clone(), psi[space.index_of_label(l)?].norm_sqr());
    }

    let waveguides = space.layout().waveguides;
    let sites = space.layout().sites.len();
    let two = waveguides == 2;
    let (rl, lr) = if two {
        (
            register_state(2, sites, 0b01).label(),
            register_state(2, sites, 0b10).label(),
        )
    } else {
        (String::new(), String::new())
    };
    let prob = |label: &str| space.index_of_label(label).map(|i| psi[i].norm_sqr()).ok();

    let mut relative_phases = BTreeMap::new();
    let anti: Vec<&String> = req
        .tracked
        .iter()
        .filter(|l| BasisState::parse(l).is_ok_and(|s| s.is_anti_bunched()))
        .collect();
    if let Some((reference, rest)) = anti.split_first() {
        for other in rest {
            if let Ok(p) = relative_phase(psi, space, reference, other, PHASE_FLOOR) {
                relative_phases.insert(format!("{other}/{reference}"), p);
            }
        }
    }

    let fidelity = match req.target {
        Some(terms) => {
            let rho = reduce_to_photons(psi, space)?;
            let photonic: Vec<(String, Complex64)> = terms
                .iter()
                .map(|(l, a)| (l.split('|').next().unwrap_or_default().to_string(), *a))
                .collect();
            Some(fidelity(&rho.target(&photonic)?, &rho.rho)?)
        }
        None => None,
    };

    let proj = QubitProjection::new(space).ok();
    let concurrence = match (&proj, space.charge() as usize == waveguides) {
        (Some(p), true) if p.qubits == 2 => p
            .two_qubit_density(psi)
            .ok()
            .map(|m| concurrence(&m))
            .transpose()?,
        _ => None,
    };
    let w_fidelity = if req.w_state {
        Some(w_state_overlap(psi, space)?)
    } else {
        None
    };

    let bunched = summed_probability(series, space, BasisState::is_bunched);
    let occupancy: Vec<Vec<f64>> = (0..waveguides)
        .map(|w| summed_probability(series, space, |s| s.photons_in(w) > 0))
        .collect();

    let oscillation = match req.oscillation {
        Some((a, b)) => {
            let pa = series.column(space.index_of_label(a)?);
            let pb = series.column(space.index_of_label(b)?);
            Some(oscillation_stats(&series.times, &pa, &pb))
        }
        None => None,
    };

    Ok(RunSummary {
        scenario: req.scenario.to_string(),
        dimension: space.dim(),
        final_time: last.time,
        dt: series.dt,
        steps: series.steps,
        records: series.len(),
        final_probabilities,
        final_P_RL: if two { prob(&rl) } else { None },
        final_P_LR: if two { prob(&lr) } else { None },
        relative_phases,
        fidelity,
        concurrence,
        w_fidelity,
        max_bunched_probability: max_of(&bunched),
        final_bunched_probability: bunched.last().copied().unwrap_or(0.0),
        max_occupation_probability: occupancy.iter().map(|v| max_of(v)).collect(),
        final_occupation_probability: occupancy.iter().map(|v| v.last().copied().unwrap_or(0.0)).collect(),
        norm_drift: norm_drift(series),
        oscillation,
    })
}
