//! Photon-pair dynamics in coupled waveguides with embedded absorbers.

pub mod basis;
pub mod error;
pub mod evolve;
pub mod hamiltonian;
pub mod observables;
pub mod parallel;
pub mod perturbation;
pub mod ramp;
pub mod scenarios;
pub mod sparse;
pub mod system;

pub use error::{Error, Result};
