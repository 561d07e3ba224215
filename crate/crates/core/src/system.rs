use serde::{Deserialize, Serialize};

use crate::basis::{AbsorberKind, Level};
use crate::error::{Error, Result};
use crate::ramp::RampSchedule;

/// Reference frame for the free Hamiltonian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Lab,
    /// Subtracts ω·Q, which is constant on the sector.
    #[default]
    Rotating,
}

/// Geometry, energies, couplings and switching schedule (ħ = 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    /// Number of waveguides, 2 or 3.
    pub waveguides: usize,
    /// Evanescent couplings between waveguides; always the planar chain.
    pub couplings: Vec<[usize; 2]>,
    /// Absorber attached to each waveguide, by waveguide index.
    pub absorbers: Vec<Option<AbsorberKind>>,
    /// Photon frequency ω.
    pub omega: f64,
    /// Absorber base frequency ω₀.
    pub omega0: f64,
    /// Detuning Δ of the middle (or two-level excited) levels from ω₀.
    pub detuning: f64,
    /// Peak waveguide–waveguide coupling.
    pub theta_max: f64,
    /// Peak waveguide–absorber coupling.
    pub lambda_max: f64,
    pub ramp: RampSchedule,
    #[serde(default)]
    pub frame: Frame,
    /// Per-mode photon cap; defaults to the sector charge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photon_cap: Option<u8>,
}

pub const DEFAULT_THETA: f64 = 1.0 / 164.0;
pub const DEFAULT_LAMBDA: f64 = 0.2;
pub const DEFAULT_DETUNING: f64 = 0.2;
pub const DEFAULT_SHOULDER: f64 = 250.0;

impl SystemSpec {
    /// Two coupled waveguides with the default energies and couplings.
    pub fn two_waveguide(a: Option<AbsorberKind>, b: Option<AbsorberKind>) -> Self {
        SystemSpec {
            waveguides: 2,
            couplings: chain(2),
            absorbers: vec![a, b],
            omega: 1.0,
            omega0: 1.0,
            detuning: DEFAULT_DETUNING,
            theta_max: DEFAULT_THETA,
            lambda_max: DEFAULT_LAMBDA,
            ramp: RampSchedule::tight(DEFAULT_SHOULDER, DEFAULT_SHOULDER, 2000.0),
            frame: Frame::Rotating,
            photon_cap: None,
        }
    }

    /// Three waveguides in a line.
    pub fn three_waveguide(absorbers: [Option<AbsorberKind>; 3]) -> Self {
        SystemSpec {
            waveguides: 3,
            couplings: chain(3),
            absorbers: absorbers.to_vec(),
            ..Self::two_waveguide(None, None)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.waveguides) {
            return Err(Error::InvalidSystem(format!(
                "waveguide count must be 2 or 3, got {}",
                self.waveguides
            )));
        }
        if self.absorbers.len() > self.waveguides {
            return Err(Error::InvalidSystem(format!(
                "absorber placed on waveguide {} but only {} waveguides exist",
                self.absorbers.len() - 1,
                self.waveguides
            )));
        }
        let mut edges: Vec<[usize; 2]> = self
            .couplings
            .iter()
            .map(|&[a, b]| [a.min(b), a.max(b)])
            .collect();
        edges.sort_unstable();
        if edges != chain(self.waveguides) {
            return Err(Error::InvalidSystem(format!(
                "couplings must form the planar chain {:?}, got {:?}",
                chain(self.waveguides),
                self.couplings
            )));
        }
        if self.omega.is_nan() || self.omega <= 0.0 {
            return Err(Error::InvalidSystem("omega must be > 0".into()));
        }
        for (name, v) in [
            ("theta_max", self.theta_max),
            ("lambda_max", self.lambda_max),
        ] {
            if v.is_nan() || v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidSystem(format!("{name} must be finite and ≥ 0")));
            }
        }
        if !self.omega0.is_finite() || !self.detuning.is_finite() {
            return Err(Error::InvalidSystem("omega0 and detuning must be finite".into()));
        }
        self.ramp.validate()
    }

    pub fn absorber(&self, waveguide: usize) -> Option<AbsorberKind> {
        self.absorbers.get(waveguide).copied().flatten()
    }

    /// Lab-frame energy of an absorber level.
    pub fn level_energy(&self, level: Level) -> f64 {
        match level {
            Level::G => 0.0,
            Level::MR | Level::ML | Level::X => self.omega0 + self.detuning,
            Level::E => 2.0 * self.omega0,
        }
    }

    pub fn total_time(&self) -> f64 {
        self.ramp.total()
    }
}

fn chain(n: usize) -> Vec<[usize; 2]> {
    (1..n).map(|b| [b - 1, b]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absorber_beyond_waveguides_is_rejected() {
        let mut spec = SystemSpec::two_waveguide(None, None);
        spec.absorbers = vec![None, None, Some(AbsorberKind::Diamond)];
        assert!(matches!(spec.validate(), Err(Error::InvalidSystem(_))));
    }

    #[test]
    fn non_chain_couplings_are_rejected() {
        let mut spec = SystemSpec::three_waveguide([None, None, None]);
        spec.couplings = vec![[0, 1], [0, 2]];
        assert!(spec.validate().is_err());
        spec.couplings = vec![[2, 1], [1, 0]];
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn negative_couplings_are_rejected() {
        let mut spec = SystemSpec::two_waveguide(None, None);
        spec.theta_max = -1.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let spec = SystemSpec::three_waveguide([
            Some(AbsorberKind::Diamond),
            None,
            Some(AbsorberKind::TwoLevel {
                polarization: crate::basis::Polarization::R,
            }),
        ]);
        let text = serde_json::to_string_pretty(&spec).unwrap();
        let back: SystemSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }
}
