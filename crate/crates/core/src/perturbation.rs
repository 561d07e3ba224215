//! Closed-form short-time amplitudes, probabilities and golden-rule rates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default width of the rectangular stand-in for `δ(E_f − E_i)`.
pub const DEFAULT_BROADENING: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    pub theta: f64,
    pub lambda: f64,
    /// Middle-level detuning Δ.
    pub delta: f64,
    pub t: f64,
    /// Two-level absorber detuning Δω_R.
    #[serde(default)]
    pub two_level_detuning: f64,
}

impl CouplingParams {
    pub fn validate(&self) -> Result<()> {
        if self.t.is_nan() || self.t < 0.0 {
            return Err(Error::InvalidArgument(format!("t must be ≥ 0, got {}", self.t)));
        }
        Ok(())
    }

    fn nonzero_delta(&self) -> Result<f64> {
        self.validate()?;
        if self.delta == 0.0 {
            return Err(Error::Singular(
                "Δ = 0 puts the middle levels on single-photon resonance".into(),
            ));
        }
        Ok(self.delta)
    }
}

/// Reading of the detuning energy in the second-order rate denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reading")]
pub enum DetuningEnergy {
    /// `ℏΔ`.
    #[default]
    Delta,
    /// `ℏΔ·ω`.
    DeltaTimesOmega { omega: f64 },
}

/// First-order rate into a middle level: zero off resonance.
pub fn gamma1(p: &CouplingParams) -> Result<f64> {
    p.nonzero_delta()?;
    Ok(0.0)
}

/// Second-order rate `G → E`, `8tλ⁴/Δ²`.
pub fn gamma2(p: &CouplingParams) -> Result<f64> {
    gamma2_with(p, DetuningEnergy::Delta)
}

pub fn gamma2_with(p: &CouplingParams, reading: DetuningEnergy) -> Result<f64> {
    let d = p.nonzero_delta()?;
    let e = match reading {
        DetuningEnergy::Delta => d,
        DetuningEnergy::DeltaTimesOmega { omega } => d * omega,
    };
    if e == 0.0 {
        return Err(Error::Singular("zero detuning energy".into()));
    }
    Ok(8.0 * p.t * p.lambda.powi(4) / (e * e))
}

/// `(1/n!)·2^{n−1}(θt)^n / i^n`.
pub fn nth_order_amplitude(n: u32, theta: f64, t: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be ≥ 1".into()));
    }
    let factorial: f64 = (1..=n).map(f64::from).product();
    let magnitude = 2f64.powi(n as i32 - 1) * (theta * t).powi(n as i32) / factorial;
    Ok(Complex64::new(magnitude, 0.0) / I.powu(n))
}

/// Amplitude of one photon hopping into the other waveguide, `−iθt`.
pub fn p_b(p: &CouplingParams) -> Complex64 {
    -I * p.theta * p.t
}

/// Amplitude of the two photons exchanging waveguides, `−θ²t²`.
pub fn p_ab(p: &CouplingParams) -> Complex64 {
    Complex64::new(-(p.theta * p.t).powi(2), 0.0)
}

/// The three terms of the two-photon-absorption amplitude:
/// `3θλ²t²/(2Δ)`, `3iθλ²t/Δ²` and `(3θλ²/Δ³)(e^{−iΔt} − 1)`.
pub fn p_tpa_terms(p: &CouplingParams) -> Result<[Complex64; 3]> {
    let d = p.nonzero_delta()?;
    let k = 3.0 * p.theta * p.lambda * p.lambda;
    let x = d * p.t;
    let expm1 = Complex64::new(-2.0 * (0.5 * x).sin().powi(2), -x.sin());
    Ok([
        Complex64::new(k * p.t * p.t / (2.0 * d), 0.0),
        I * k * p.t / (d * d),
        expm1 * (k / d.powi(3)),
    ])
}

/// Third-order amplitude of reaching an absorber's doubly excited level.
///
/// The O(t) and O(t²) parts of the three terms cancel exactly, so for small
/// `Δt` the sum is taken from the remaining exponential series.
pub fn p_tpa(p: &CouplingParams) -> Result<Complex64> {
    let d = p.nonzero_delta()?;
    let x = d * p.t;
    if x.abs() >= 0.5 {
        return Ok(p_tpa_terms(p)?.iter().sum());
    }
    let z = -I * x;
    let mut term = z * z * z / 6.0;
    let mut tail = term;
    for k in 4..30 {
        term *= z / k as f64;
        tail += term;
        if term.norm() < 1e-18 * tail.norm() {
            break;
        }
    }
    Ok(tail * (3.0 * p.theta * p.lambda * p.lambda / d.powi(3)))
}

#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionProbabilities {
    pub P_B: f64,
    pub P_AB: f64,
    pub P_TPA: f64,
    /// `d/dt P_B = 2θ²t`.
    pub dP_B_dt: f64,
}

pub fn transition_probabilities(p: &CouplingParams) -> Result<TransitionProbabilities> {
    Ok(TransitionProbabilities {
        P_B: p_b(p).norm_sqr(),
        P_AB: p_ab(p).norm_sqr(),
        P_TPA: p_tpa(p)?.norm_sqr(),
        dP_B_dt: 2.0 * p.theta * p.theta * p.t,
    })
}

#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelProbabilities {
    pub P_lambda: f64,
    pub P_theta: f64,
    /// `P_λ / P_θ`; absent when `θt = 0`.
    pub ratio: Option<f64>,
}

/// `[sin(x)/x]²` with the `x → 0` limit.
fn sinc_sqr(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 3.0
    } else {
        (x.sin() / x).powi(2)
    }
}

/// Single-photon absorption versus hopping with a two-level absorber.
pub fn two_level_probs(p: &CouplingParams) -> Result<TwoLevelProbabilities> {
    p.validate()?;
    let x = 0.5 * p.two_level_detuning * p.t;
    let p_lambda = 4.0 * (p.lambda * p.t).powi(2) * sinc_sqr(x);
    let p_theta = (p.theta * p.t).powi(2);
    let ratio = (p.theta * p.t != 0.0).then(|| 4.0 * (p.lambda / p.theta).powi(2) * sinc_sqr(x));
    Ok(TwoLevelProbabilities {
        P_lambda: p_lambda,
        P_theta: p_theta,
        ratio,
    })
}

/// Leading Taylor form `4λ²t²[1 − (Δω_R t/2)²/3!]` of the two-level absorption
/// probability.
pub fn two_level_p_lambda_taylor(p: &CouplingParams) -> f64 {
    let x = 0.5 * p.two_level_detuning * p.t;
    4.0 * (p.lambda * p.t).powi(2) * (1.0 - x * x / 6.0)
}

/// One second-order path `i → m → f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntermediatePath {
    pub energy: f64,
    /// `⟨m|H_I|i⟩`.
    pub v_mi: f64,
    /// `⟨f|H_I|m⟩`.
    pub v_fm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenRuleInput {
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Direct element `⟨f|H_I|i⟩`.
    pub direct: f64,
    pub paths: Vec<IntermediatePath>,
    pub broadening: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenRuleRates {
    pub first: f64,
    pub second: f64,
}

/// `Γ¹ = 2π|V_fi|² δ_ε(E_f − E_i)` and
/// `Γ² = 2t|Σ_m V_fm V_mi / (E_i − E_m)|²`.
pub fn golden_rule_rates(input: &GoldenRuleInput, t: f64) -> Result<GoldenRuleRates> {
    if input.broadening.is_nan() || input.broadening <= 0.0 {
        return Err(Error::InvalidArgument("broadening must be > 0".into()));
    }
    let gap = input.final_energy - input.initial_energy;
    let delta = if gap.abs() <= 0.5 * input.broadening {
        1.0 / input.broadening
    } else {
        0.0
    };
    let first = 2.0 * std::f64::consts::PI * input.direct * input.direct * delta;
    let mut sum = 0.0;
    for path in &input.paths {
        let denom = input.initial_energy - path.energy;
        if denom == 0.0 {
            return Err(Error::Singular(format!(
                "intermediate state at E = {} is degenerate with the initial state",
                path.energy
            )));
        }
        sum += path.v_fm * path.v_mi / denom;
    }
    Ok(GoldenRuleRates {
        first,
        second: 2.0 * t * sum * sum,
    })
}

/// Golden-rule input for a photon pair `|R, L⟩` and a diamond absorber at
/// `G`, with `ω = ω₀ = 1`: the two middle levels are the intermediate states
/// and `E` the final one.
pub fn diamond_pair_absorption(lambda: f64, delta: f64) -> GoldenRuleInput {
    let omega = 1.0;
    let middle = omega + delta + omega;
    GoldenRuleInput {
        initial_energy: 2.0 * omega,
        final_energy: 2.0 * omega,
        direct: 0.0,
        paths: vec![
            IntermediatePath {
                energy: middle,
                v_mi: lambda,
                v_fm: lambda,
            },
            IntermediatePath {
                energy: middle,
                v_mi: lambda,
                v_fm: lambda,
            },
        ],
        broadening: DEFAULT_BROADENING,
    }
}

/// Golden-rule input for one photon and a diamond absorber: a single
/// detuned transition `G → M`.
pub fn diamond_single_absorption(lambda: f64, delta: f64) -> GoldenRuleInput {
    let omega = 1.0;
    GoldenRuleInput {
        initial_energy: omega,
        final_energy: omega + delta,
        direct: lambda,
        paths: Vec::new(),
        broadening: DEFAULT_BROADENING,
    }
}
