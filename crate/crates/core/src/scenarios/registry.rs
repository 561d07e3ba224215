//! Built-in scenarios. Plateau lengths marked "calibrated" were found with
//! [`calibrate_plateau`](super::calibrate_plateau) on these exact settings.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{CalibrationSpec, Scenario, Target, Term};
use crate::basis::{AbsorberKind, Polarization};
use crate::error::{Error, Result};
use crate::evolve::IntegratorConfig;
use crate::ramp::RampSchedule;
use crate::system::{SystemSpec, DEFAULT_SHOULDER};

/// Calibrated θ plateaus.
pub const PLATEAU_FIG4A: f64 = 2108.628636;
pub const PLATEAU_FIG7: f64 = 3509.406593;
pub const PLATEAU_FIG9: f64 = 684.418805;
pub const PLATEAU_FIG10: f64 = 3827.285639;
pub const PLATEAU_FIG6: f64 = 4449.916298;

/// Extended plateau for the exchange oscillation.
pub const PLATEAU_FIG4B: f64 = 24000.0;

/// λ_max maximizing the W fidelity of the three-waveguide run.
pub const LAMBDA_FIG6: f64 = 0.1211;

pub const PLATEAU_FIG11: f64 = 400.0;

/// Step ratio used by the shipped scenarios.
pub const SHIPPED_STEP_RATIO: f64 = 0.025;

/// The resonant single-photon run sits right at its norm bound.
pub const SINGLE_PHOTON_STEP_RATIO: f64 = 0.01;

const NAMES: [&str; 11] = [
    "fig4a", "fig4b", "fig5", "fig6", "fig7", "fig9", "fig10", "fig11", "fig12", "distill", "maxent",
];

pub fn names() -> &'static [&'static str] {
    &NAMES
}

pub fn get(name: &str) -> Result<Scenario> {
    Ok(match name {
        "fig4a" => bell(
            "fig4a",
            "Diamond absorbers on both waveguides; equal superposition of the anti-bunched states",
            [Some(AbsorberKind::Diamond), Some(AbsorberKind::Diamond)],
            PLATEAU_FIG4A,
        ),
        "fig4b" => {
            let mut s = bell(
                "fig4b",
                "Extended interaction: exchange oscillation between the anti-bunched states",
                [Some(AbsorberKind::Diamond), Some(AbsorberKind::Diamond)],
                PLATEAU_FIG4B,
            );
            s.target = Target::None;
            s.calibration = None;
            s.oscillation = Some(anti_pair(2));
            s
        }
        "fig5" => bell(
            "fig5",
            "Fidelity with the Bell target along the calibrated diamond run",
            [Some(AbsorberKind::Diamond), Some(AbsorberKind::Diamond)],
            PLATEAU_FIG4A,
        ),
        "fig7" => bell_with(
            "fig7",
            "Diamond absorber on the first waveguide only",
            [Some(AbsorberKind::Diamond), None],
            PLATEAU_FIG7,
            Quarter::Plus,
        ),
        "fig9" => {
            let mut s = bell_with(
                "fig9",
                "V-type absorbers on both waveguides",
                [Some(AbsorberKind::VType), Some(AbsorberKind::VType)],
                PLATEAU_FIG9,
                Quarter::Plus,
            );
            s.thresholds.remove("max_bunched_probability");
            s.thresholds.insert("final_bunched_probability".into(), 0.01);
            s
        }
        "fig10" => {
            let mut s = bell(
                "fig10",
                "V-type absorber on the first waveguide only",
                [Some(AbsorberKind::VType), None],
                PLATEAU_FIG10,
            );
            s.thresholds.remove("max_bunched_probability");
            s.thresholds.insert("final_bunched_probability".into(), 0.01);
            s
        }
        "fig6" => three_waveguide(
            "fig6",
            "Three waveguides, diamond absorbers on the outer two; W state from |RLR>",
            [Some(AbsorberKind::Diamond), None, Some(AbsorberKind::Diamond)],
        ),
        "fig12" => {
            let mut s = three_waveguide(
                "fig12",
                "Three waveguides, diamond absorbers on all three; the input is frozen",
                [
                    Some(AbsorberKind::Diamond),
                    Some(AbsorberKind::Diamond),
                    Some(AbsorberKind::Diamond),
                ],
            );
            s.calibration = None;
            s
        }
        "fig11" => single_photon(),
        "distill" => {
            let mut s = get("fig4b")?;
            s.name = "distill".into();
            s.description = "Partially entangled input under the extended interaction".into();
            s.initial = vec![
                Term::new("R.L|G.G", Complex64::new(3f64.sqrt() / 2.0, 0.0)),
                Term::new("L.R|G.G", Complex64::new(0.5, 0.0)),
            ];
            s
        }
        "maxent" => {
            let mut s = get("fig4b")?;
            s.name = "maxent".into();
            s.description = "Maximally entangled input under the extended interaction".into();
            s.initial = vec![
                Term::new("R.L|G.G", Complex64::new(FRAC_1_SQRT_2, 0.0)),
                Term::new("L.R|G.G", Complex64::new(FRAC_1_SQRT_2, 0.0)),
            ];
            s
        }
        other => return Err(Error::UnknownScenario(other.to_string())),
    })
}

fn integrator() -> IntegratorConfig {
    IntegratorConfig {
        step_ratio: SHIPPED_STEP_RATIO,
        ..IntegratorConfig::default()
    }
}

fn ground(sites: usize) -> String {
    vec!["G"; sites].join(".")
}

fn anti_pair(sites: usize) -> [String; 2] {
    let g = ground(sites);
    [format!("R.L|{g}"), format!("L.R|{g}")]
}

fn base_thresholds() -> BTreeMap<String, f64> {
    BTreeMap::from([
        ("norm_drift".to_string(), 1e-8),
        ("max_bunched_probability".to_string(), 0.01),
    ])
}

/// Relative phase of `|L,R⟩` in the Bell target, in units of π/2.
#[derive(Clone, Copy)]
enum Quarter {
    Minus,
    Plus,
}

fn bell(name: &str, description: &str, absorbers: [Option<AbsorberKind>; 2], plateau: f64) -> Scenario {
    bell_with(name, description, absorbers, plateau, Quarter::Minus)
}

fn bell_with(
    name: &str,
    description: &str,
    absorbers: [Option<AbsorberKind>; 2],
    plateau: f64,
    phase: Quarter,
) -> Scenario {
    let im = match phase {
        Quarter::Minus => -FRAC_1_SQRT_2,
        Quarter::Plus => FRAC_1_SQRT_2,
    };
    let mut system = SystemSpec::two_waveguide(absorbers[0], absorbers[1]);
    system.ramp = RampSchedule::tight(DEFAULT_SHOULDER, DEFAULT_SHOULDER, plateau);
    let sites = absorbers.iter().flatten().count();
    let g = ground(sites);
    let [rl, lr] = anti_pair(sites);
    let mut tracked = vec![rl.clone(), lr.clone(), format!("RL.0|{g}"), format!("0.RL|{g}")];
    for (i, a) in absorbers.iter().flatten().enumerate() {
        if *a == AbsorberKind::Diamond {
            let mut levels = vec!["G"; sites];
            levels[i] = "E";
            tracked.push(format!("0.0|{}", levels.join(".")));
        }
    }
    Scenario {
        name: name.into(),
        description: description.into(),
        system,
        initial: vec![Term::new(&rl, Complex64::new(1.0, 0.0))],
        integrator: integrator(),
        tracked,
        target: Target::Pure {
            terms: vec![
                Term::new(&rl, Complex64::new(FRAC_1_SQRT_2, 0.0)),
                Term::new(&lr, Complex64::new(0.0, im)),
            ],
        },
        oscillation: None,
        calibration: Some(CalibrationSpec {
            first: rl,
            second: lr,
            window: [100.0, 8000.0],
            tolerance: 1e-3,
        }),
        thresholds: base_thresholds(),
    }
}

fn three_waveguide(name: &str, description: &str, absorbers: [Option<AbsorberKind>; 3]) -> Scenario {
    let mut system = SystemSpec::three_waveguide(absorbers);
    system.lambda_max = LAMBDA_FIG6;
    system.ramp = RampSchedule::tight(DEFAULT_SHOULDER, DEFAULT_SHOULDER, PLATEAU_FIG6);
    let g = ground(absorbers.iter().flatten().count());
    let rlr = format!("R.L.R|{g}");
    let rrl = format!("R.R.L|{g}");
    let lrr = format!("L.R.R|{g}");
    Scenario {
        name: name.into(),
        description: description.into(),
        system,
        initial: vec![Term::new(&rlr, Complex64::new(1.0, 0.0))],
        integrator: integrator(),
        tracked: vec![rlr.clone(), rrl.clone(), lrr],
        target: Target::W,
        oscillation: None,
        calibration: Some(CalibrationSpec {
            first: rlr,
            second: rrl,
            window: [500.0, 10000.0],
            tolerance: 1e-3,
        }),
        thresholds: BTreeMap::from([("norm_drift".to_string(), 1e-8)]),
    }
}

fn single_photon() -> Scenario {
    let mut system = SystemSpec::two_waveguide(
        Some(AbsorberKind::TwoLevel {
            polarization: Polarization::R,
        }),
        None,
    );
    system.detuning = 0.0;
    system.ramp = RampSchedule::tight(DEFAULT_SHOULDER, DEFAULT_SHOULDER, PLATEAU_FIG11);
    Scenario {
        name: "fig11".into(),
        description: "One R photon, two-level absorber on its input waveguide; sweep omega_r".into(),
        system,
        initial: vec![Term::new("R.0|G", Complex64::new(1.0, 0.0))],
        integrator: IntegratorConfig {
            step_ratio: SINGLE_PHOTON_STEP_RATIO,
            ..IntegratorConfig::default()
        },
        tracked: vec!["R.0|G".into(), "0.R|G".into(), "0.0|X".into()],
        target: Target::None,
        oscillation: None,
        calibration: None,
        thresholds: BTreeMap::from([("norm_drift".to_string(), 1e-8)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves_and_prepares() {
        for name in names() {
            let s = get(name).unwrap();
            assert_eq!(&s.name, name);
            s.prepare().unwrap();
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(get("nosuch"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn json_round_trip() {
        for name in names() {
            let s = get(name).unwrap();
            let back = Scenario::from_json(&s.to_json().unwrap()).unwrap();
            assert_eq!(s, back);
        }
    }
}
