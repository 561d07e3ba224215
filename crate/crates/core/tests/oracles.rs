//! Independent oracles for the assembled Hamiltonian and the integrator.

mod common;

use num_complex::Complex64;

use zeno_core::basis::{enumerate_sector, AbsorberKind, BasisState, Level, Polarization};
use zeno_core::evolve::{propagate, StateVector};
use zeno_core::hamiltonian::build_blocks;
use zeno_core::observables::reduce_to_photons;
use zeno_core::ramp::{RampSchedule, Shoulder};
use zeno_core::scenarios::{calibrate_bell_time, calibrate_plateau, get};
use zeno_core::system::{Frame, SystemSpec};
use zeno_core::Error;

use common::brute_force_dimension;

const KINDS: [Option<AbsorberKind>; 5] = [
    None,
    Some(AbsorberKind::TwoLevel { polarization: Polarization::R }),
    Some(AbsorberKind::TwoLevel { polarization: Polarization::L }),
    Some(AbsorberKind::VType),
    Some(AbsorberKind::Diamond),
];

fn layouts() -> Vec<SystemSpec> {
    let mut out = Vec::new();
    for a in KINDS {
        for b in KINDS {
            out.push(SystemSpec::two_waveguide(a, b));
            for c in KINDS {
                out.push(SystemSpec::three_waveguide([a, b, c]));
            }
        }
    }
    out
}

#[test]
fn enumeration_matches_brute_force_up_to_three_photons() {
    for spec in layouts() {
        for charge in 0..=3 {
            let space = enumerate_sector(&spec, charge).unwrap();
            let brute = brute_force_dimension(&spec, charge, space.cap());
            assert_eq!(space.dim(), brute, "{:?} charge {charge}", spec.absorbers);
        }
    }
}

#[test]
fn scenario_layouts_have_brute_force_dimensions() {
    let pair = SystemSpec::two_waveguide(Some(AbsorberKind::Diamond), Some(AbsorberKind::Diamond));
    assert_eq!(enumerate_sector(&pair, 0).unwrap().dim(), 1);
    let mut capped = pair.clone();
    capped.photon_cap = Some(2);
    assert_eq!(enumerate_sector(&capped, 2).unwrap().dim(), brute_force_dimension(&capped, 2, 2));
    let ends = SystemSpec::three_waveguide([Some(AbsorberKind::Diamond), None, Some(AbsorberKind::Diamond)]);
    assert_eq!(enumerate_sector(&ends, 3).unwrap().dim(), brute_force_dimension(&ends, 3, 3));
}

fn level_name(l: Level) -> &'static str {
    match l {
        Level::G => "G",
        Level::MR => "MR",
        Level::ML => "ML",
        Level::E => "E",
        Level::X => "X",
    }
}

/// Allowed absorptions `(lower, photon, upper)` read off the level diagrams.
fn absorbs(kind: AbsorberKind, lower: &str, pol: Polarization, upper: &str) -> bool {
    use Polarization::{L, R};
    match kind {
        AbsorberKind::Diamond => matches!(
            (lower, pol, upper),
            ("G", R, "MR") | ("G", L, "ML") | ("MR", L, "E") | ("ML", R, "E")
        ),
        AbsorberKind::VType => matches!((lower, pol, upper), ("G", R, "MR") | ("G", L, "ML")),
        AbsorberKind::TwoLevel { polarization } => pol == polarization && lower == "G" && upper == "X",
    }
}

/// `⟨f|H_θ|i⟩` by comparing occupation tuples: one photon of one
/// polarization moved between chain neighbours, weighted by √(n_src·(n_dst+1)).
fn hop_element(spec: &SystemSpec, f: &BasisState, i: &BasisState) -> f64 {
    if f.levels != i.levels {
        return 0.0;
    }
    let mut total = 0.0;
    for &[a, b] in &spec.couplings {
        for (src, dst) in [(a, b), (b, a)] {
            for p in Polarization::BOTH {
                let mut moved = i.clone();
                let ns = i.occupation(src, p);
                let nd = i.occupation(dst, p);
                if ns == 0 {
                    continue;
                }
                moved.occupations[zeno_core::basis::Layout::mode(src, p)] -= 1;
                moved.occupations[zeno_core::basis::Layout::mode(dst, p)] += 1;
                if &moved == f {
                    total += (ns as f64 * (nd as f64 + 1.0)).sqrt();
                }
            }
        }
    }
    total
}

/// `⟨f|H_λ|i⟩`: exactly one site changes level and exactly one photon of
/// its waveguide appears or disappears accordingly.
fn absorber_element(spec: &SystemSpec, f: &BasisState, i: &BasisState) -> f64 {
    let sites: Vec<(usize, AbsorberKind)> = spec
        .absorbers
        .iter()
        .enumerate()
        .filter_map(|(w, k)| k.map(|k| (w, k)))
        .collect();
    let changed: Vec<usize> = (0..sites.len()).filter(|&s| f.levels[s] != i.levels[s]).collect();
    if changed.len() != 1 {
        return 0.0;
    }
    let s = changed[0];
    let (w, kind) = sites[s];
    let diff: Vec<(usize, i32)> = f
        .occupations
        .iter()
        .zip(&i.occupations)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(m, (&a, &b))| (m, a as i32 - b as i32))
        .collect();
    if diff.len() != 1 || diff[0].1.abs() != 1 {
        return 0.0;
    }
    let (mode, delta) = diff[0];
    let pol = Polarization::BOTH
        .into_iter()
        .find(|&p| zeno_core::basis::Layout::mode(w, p) == mode);
    let Some(pol) = pol else { return 0.0 };
    let (lower, upper, n) = if delta < 0 {
        (i.levels[s], f.levels[s], i.occupations[mode])
    } else {
        (f.levels[s], i.levels[s], f.occupations[mode])
    };
    if absorbs(kind, level_name(lower), pol, level_name(upper)) {
        (n as f64).sqrt()
    } else {
        0.0
    }
}

#[test]
fn coupling_blocks_match_ladder_operator_oracle() {
    for spec in layouts() {
        let space = enumerate_sector(&spec, 2).unwrap();
        let blocks = build_blocks(&spec, &space).unwrap();
        for (r, f) in space.states().iter().enumerate() {
            for (c, i) in space.states().iter().enumerate() {
                let want_theta = hop_element(&spec, f, i);
                let want_lambda = absorber_element(&spec, f, i);
                assert!(
                    (blocks.h_theta().get(r, c) - want_theta).abs() < 1e-15,
                    "H_θ ⟨{}|·|{}⟩",
                    f.label(),
                    i.label()
                );
                assert!(
                    (blocks.h_lambda().get(r, c) - want_lambda).abs() < 1e-15,
                    "H_λ ⟨{}|·|{}⟩ in {:?}",
                    f.label(),
                    i.label(),
                    spec.absorbers
                );
            }
        }
    }
}

#[test]
fn bunched_to_anti_bunched_hop_is_bosonic() {
    let spec = SystemSpec::two_waveguide(Some(AbsorberKind::Diamond), Some(AbsorberKind::Diamond));
    let space = enumerate_sector(&spec, 2).unwrap();
    let blocks = build_blocks(&spec, &space).unwrap();
    let rl = space.index_of_label("R.L|G.G").unwrap();
    let pair = space.index_of_label("RL.0|G.G").unwrap();
    let rr = space.index_of_label("RR.0|G.G").unwrap();
    let r_r = space.index_of_label("R.R|G.G").unwrap();
    assert_eq!(blocks.h_theta().get(rl, pair), 1.0);
    assert!((blocks.h_theta().get(rr, r_r) - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn free_energies_follow_level_scheme() {
    for frame in [Frame::Lab, Frame::Rotating] {
        let mut spec = SystemSpec::two_waveguide(Some(AbsorberKind::Diamond), Some(AbsorberKind::VType));
        spec.omega = 1.3;
        spec.omega0 = 0.9;
        spec.detuning = 0.25;
        spec.frame = frame;
        let space = enumerate_sector(&spec, 2).unwrap();
        let blocks = build_blocks(&spec, &space).unwrap();
        for (k, s) in space.states().iter().enumerate() {
            let atoms: f64 = s
                .levels
                .iter()
                .map(|l| match l {
                    Level::G => 0.0,
                    Level::MR | Level::ML | Level::X => 0.9 + 0.25,
                    Level::E => 1.8,
                })
                .sum();
            let mut want = 1.3 * s.photons() as f64 + atoms;
            if frame == Frame::Rotating {
                want -= 1.3 * 2.0;
            }
            assert!((blocks.h0_diagonal()[k] - want).abs() < 1e-14, "{}", s.label());
        }
    }
}

/// θ-only two-waveguide run in which each photon undergoes the rotation
/// `[[cos Θ, −i sin Θ], [−i sin Θ, cos Θ]]`.
fn beamsplitter_errors(shoulder: Shoulder) -> f64 {
    let mut spec = SystemSpec::two_waveguide(Some(AbsorberKind::Diamond), Some(AbsorberKind::Diamond));
    spec.lambda_max = 0.0;
    spec.ramp = RampSchedule::tight(0.0, 30.0, 25.0);
    spec.ramp.shoulder = shoulder;
    let area = spec.ramp.theta_area();
    let mut worst: f64 = 0.0;
    for k in 0..=16 {
        let big = std::f64::consts::PI * k as f64 / 16.0;
        let mut sys = spec.clone();
        sys.theta_max = big / area;
        let space = enumerate_sector(&sys, 2).unwrap();
        let blocks = build_blocks(&sys, &space).unwrap();
        let mut psi = StateVector::basis(&space, "R.L|G.G").unwrap().amplitudes;
        let total = sys.total_time();
        propagate(&sys, &blocks, &mut psi, 0.0, total, 10_000, 1e-10, |_, _, _| {}).unwrap();
        let p = |l: &str| psi[space.index_of_label(l).unwrap()].norm_sqr();
        let (s2, c2) = (big.sin().powi(2), big.cos().powi(2));
        for (label, want) in [
            ("R.L|G.G", c2 * c2),
            ("L.R|G.G", s2 * s2),
            ("RL.0|G.G", s2 * c2),
            ("0.RL|G.G", s2 * c2),
        ] {
            worst = worst.max((p(label) - want).abs());
        }
    }
    worst
}

#[test]
fn beamsplitter_oracle_sine_squared() {
    assert!(beamsplitter_errors(Shoulder::SineSquared) < 1e-6);
}

#[test]
fn beamsplitter_oracle_linear() {
    assert!(beamsplitter_errors(Shoulder::Linear) < 1e-6);
}

fn fig4a_final(dt: f64) -> Vec<Complex64> {
    let mut s = get("fig4a").unwrap();
    s.integrator.dt = Some(dt);
    s.integrator.stride = Some(usize::MAX);
    s.integrator.drift_tolerance = 1e-6;
    s.run().unwrap().series.final_state().amplitudes
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

#[test]
fn richardson_fourth_order() {
    let s = get("fig4a").unwrap();
    let prep = s.prepare().unwrap();
    let base = 0.08 / prep.blocks.norm_bound(&s.system);
    let [a, b, c] = [base, base / 2.0, base / 4.0].map(fig4a_final);
    let ratio = distance(&a, &b) / distance(&b, &c);
    assert!((13.0..19.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn forward_then_backward_returns_to_start() {
    let s = get("fig4a").unwrap();
    let prep = s.prepare().unwrap();
    let total = s.system.total_time();
    let plan = s.integrator.plan(prep.blocks.norm_bound(&s.system), total).unwrap();
    let mut psi = prep.psi0.amplitudes.clone();
    propagate(&s.system, &prep.blocks, &mut psi, 0.0, total, plan.steps, 1e-8, |_, _, _| {}).unwrap();
    propagate(&s.system, &prep.blocks, &mut psi, total, 0.0, plan.steps, 1e-8, |_, _, _| {}).unwrap();
    let overlap: Complex64 = prep.psi0.amplitudes.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum();
    assert!(1.0 - overlap.norm_sqr() < 1e-7, "deficit {}", 1.0 - overlap.norm_sqr());
}

#[test]
fn coarse_step_aborts_with_drift_diagnostic() {
    let mut s = get("fig4a").unwrap();
    s.integrator.step_ratio = 0.1;
    s.integrator.drift_tolerance = 1e-13;
    let err = s.run().unwrap_err();
    assert!(matches!(err, Error::NormDrift { .. }));
    assert!(err.to_string().contains("smaller dt"));
}

#[test]
fn shipped_plateau_is_calibrated() {
    let s = get("fig4a").unwrap();
    let cal = calibrate_bell_time(&s, [100.0, 8000.0]).unwrap();
    assert!((cal.plateau - s.plateau()).abs() < 0.01, "{} vs {}", cal.plateau, s.plateau());
    assert!(cal.imbalance.abs() < 1e-3);
}

#[test]
fn doubled_area_completes_the_swap() {
    let s = get("fig4a").unwrap();
    let doubled = s.with_plateau(2.0 * s.plateau() + s.system.ramp.theta_on);
    let out = doubled.run().unwrap();
    let rl = out.summary.final_P_RL.unwrap();
    let lr = out.summary.final_P_LR.unwrap();
    assert!(lr / (rl + lr) > 0.98, "P(RL) {rl}, P(LR) {lr}");
    assert!(out.summary.max_bunched_probability < 0.01);
}

#[test]
fn calibration_without_absorption_succeeds_but_bunches() {
    let mut s = get("fig4a").unwrap();
    s.system.lambda_max = 0.0;
    let cal = calibrate_plateau(&s, s.calibration.as_ref().unwrap()).unwrap();
    let out = cal.scenario.run().unwrap();
    let area = cal.scenario.system.theta_max * cal.scenario.system.ramp.theta_area();
    let offset = (area - std::f64::consts::FRAC_PI_4) / std::f64::consts::FRAC_PI_2;
    assert!((offset - offset.round()).abs() < 1e-3, "Θ = {area}");
    let checks = cal.scenario.check_thresholds(&out.summary).unwrap();
    let bunched = checks.iter().find(|c| c.field == "max_bunched_probability").unwrap();
    assert!(!bunched.pass);
    assert!((out.summary.final_bunched_probability - 0.5).abs() < 1e-3);
}

#[test]
fn calibration_window_without_crossing_fails() {
    let s = get("fig4a").unwrap();
    let err = calibrate_bell_time(&s, [100.0, 1000.0]).unwrap_err();
    assert!(matches!(err, Error::Calibration(_)));
    assert!(err.to_string().contains("never changes sign"));
}

#[test]
fn photonic_marginal_of_fig4a_is_a_density_matrix() {
    let out = get("fig4a").unwrap().run().unwrap();
    let rho = reduce_to_photons(&out.series.final_state().amplitudes, &out.space).unwrap();
    assert!((rho.trace() - 1.0).abs() < 1e-8);
    let eig = rho.rho.clone().symmetric_eigen();
    assert!(eig.eigenvalues.iter().all(|&e| e > -1e-12));
    assert_eq!((&rho.rho - rho.rho.adjoint()).camax(), 0.0);
}

#[test]
fn fig4a_is_maximally_entangled() {
    let out = get("fig4a").unwrap().run().unwrap();
    assert!(out.summary.concurrence.unwrap() >= 0.95);
}

#[test]
fn initial_populations() {
    let out = get("fig4a").unwrap().run().unwrap();
    let first = &out.series.states[0];
    let rl = out.space.index_of_label("R.L|G.G").unwrap();
    for (k, a) in first.iter().enumerate() {
        assert_eq!(a.norm_sqr(), if k == rl { 1.0 } else { 0.0 });
    }
    for s in &out.series.states {
        let total: f64 = s.iter().map(|a| a.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-8);
    }
}

#[test]
fn v_type_bunching_is_transient() {
    for name in ["fig9", "fig10"] {
        let out = get(name).unwrap().run().unwrap();
        assert!(out.summary.final_bunched_probability < 0.01, "{name}");
        assert!(out.summary.max_bunched_probability > out.summary.final_bunched_probability, "{name}");
    }
}
