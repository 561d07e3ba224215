//! Adiabatic switching schedule for the two couplings.
//!
//! ```text
//!  λ   ___/‾‾‾‾‾‾‾‾‾‾‾‾‾‾‾‾‾‾‾‾‾\___
//!  θ   ______/‾‾‾‾‾‾‾‾‾‾‾‾\_______
//!      |λon|g|θon| θmax |θon|g|λon|
//! ```
//!
//! The θ window is centred in the λ plateau of length `lambda_max`; `g` is the
//! guard `(lambda_max - 2·theta_on - theta_max) / 2`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shoulder {
    Linear,
    #[default]
    SineSquared,
}

impl Shoulder {
    /// Rising edge on `s ∈ [0, 1]`.
    pub fn rise(self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        match self {
            Shoulder::Linear => s,
            Shoulder::SineSquared => (FRAC_PI_2 * s).sin().powi(2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coupling {
    Theta,
    Lambda,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampSchedule {
    pub lambda_on: f64,
    pub theta_on: f64,
    pub theta_max: f64,
    pub lambda_max: f64,
    #[serde(default)]
    pub shoulder: Shoulder,
}

impl RampSchedule {
    /// Schedule whose λ plateau exactly spans the θ window.
    pub fn tight(lambda_on: f64, theta_on: f64, theta_max: f64) -> Self {
        RampSchedule {
            lambda_on,
            theta_on,
            theta_max,
            lambda_max: 2.0 * theta_on + theta_max,
            shoulder: Shoulder::SineSquared,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda_on", self.lambda_on),
            ("theta_on", self.theta_on),
            ("theta_max", self.theta_max),
            ("lambda_max", self.lambda_max),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidSystem(format!("ramp.{name} must be finite and ≥ 0, got {v}")));
            }
        }
        if self.guard() < -1e-9 * self.total().max(1.0) {
            return Err(Error::InvalidSystem(format!(
                "ramp.lambda_max ({}) must cover 2·theta_on + theta_max ({})",
                self.lambda_max,
                2.0 * self.theta_on + self.theta_max
            )));
        }
        Ok(())
    }

    pub fn total(&self) -> f64 {
        2.0 * self.lambda_on + self.lambda_max
    }

    pub fn guard(&self) -> f64 {
        0.5 * (self.lambda_max - 2.0 * self.theta_on - self.theta_max)
    }

    /// Time at which θ starts to rise.
    pub fn theta_start(&self) -> f64 {
        self.lambda_on + self.guard().max(0.0)
    }

    /// Interval over which θ sits at its maximum.
    pub fn theta_plateau(&self) -> (f64, f64) {
        let a = self.theta_start() + self.theta_on;
        (a, a + self.theta_max)
    }

    /// Same schedule with a new θ plateau, keeping the guard intervals.
    pub fn with_theta_plateau(&self, theta_max: f64) -> Self {
        RampSchedule {
            theta_max,
            lambda_max: self.lambda_max + (theta_max - self.theta_max),
            ..*self
        }
    }

    /// ∫ envelope(θ, t) dt over the whole run. Both shoulder shapes average
    /// one half over their edge.
    pub fn theta_area(&self) -> f64 {
        self.theta_on + self.theta_max
    }

    /// Envelope value in `[0, 1]`; zero outside `[0, total]`.
    pub fn envelope(&self, which: Coupling, t: f64) -> f64 {
        if !(0.0..=self.total()).contains(&t) {
            return 0.0;
        }
        match which {
            Coupling::Lambda => self.trapezoid(t, 0.0, self.lambda_on, self.lambda_max),
            Coupling::Theta => self.trapezoid(t, self.theta_start(), self.theta_on, self.theta_max),
        }
    }

    fn trapezoid(&self, t: f64, start: f64, edge: f64, hold: f64) -> f64 {
        let rise_end = start + edge;
        let fall_start = rise_end + hold;
        let end = fall_start + edge;
        if t < start || t > end {
            0.0
        } else if t < rise_end {
            self.shoulder.rise((t - start) / edge)
        } else if t <= fall_start {
            1.0
        } else {
            self.shoulder.rise((end - t) / edge)
        }
    }
}
