//! Oracles shared by the integration tests.

#![allow(dead_code)]

use zeno_core::basis::{AbsorberKind, BasisState, Layout, Level, Polarization};
use zeno_core::system::SystemSpec;

fn level_charges(kind: AbsorberKind) -> Vec<u32> {
    match kind {
        AbsorberKind::TwoLevel { .. } => vec![0, 1],
        AbsorberKind::VType => vec![0, 1, 1],
        AbsorberKind::Diamond => vec![0, 1, 1, 2],
    }
}

/// Count of all (occupation, level) tuples with photons per mode ≤ `cap`
/// whose excitation charge equals `charge`, by exhaustive mixed-radix
/// enumeration.
pub fn brute_force_dimension(spec: &SystemSpec, charge: u32, cap: u8) -> usize {
    let modes = 2 * spec.waveguides;
    let levels: Vec<Vec<u32>> = spec.absorbers.iter().flatten().map(|&k| level_charges(k)).collect();
    let mut digits = vec![cap as u64 + 1; modes];
    digits.extend(levels.iter().map(|l| l.len() as u64));
    let total: u64 = digits.iter().product();
    (0..total)
        .filter(|&code| {
            let mut c = code;
            let mut q = 0;
            for (slot, &d) in digits.iter().enumerate() {
                let v = (c % d) as u32;
                c /= d;
                q += if slot < modes { v } else { levels[slot - modes][v as usize] };
            }
            q == charge
        })
        .count()
}

/// Mirror image of `s` with waveguide `w` sent to `waveguides − 1 − w`.
pub fn mirrored(s: &BasisState, waveguides: usize) -> BasisState {
    let mut occupations = vec![0; s.occupations.len()];
    for w in 0..waveguides {
        for p in Polarization::BOTH {
            occupations[Layout::mode(waveguides - 1 - w, p)] = s.occupation(w, p);
        }
    }
    let mut levels: Vec<Level> = s.levels.clone();
    levels.reverse();
    BasisState { occupations, levels }
}

pub fn mirror_symmetric(spec: &SystemSpec) -> bool {
    spec.absorbers.iter().eq(spec.absorbers.iter().rev())
}
