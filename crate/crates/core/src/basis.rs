//! Occupation-number basis for the photon ⊗ absorber Hilbert space, restricted
//! to one sector of conserved excitation charge.
//!
//! Field order is canonical everywhere: waveguides ascending, `R` before `L`
//! within a waveguide, then absorber sites in ascending waveguide order. The
//! enumeration walks that order depth-first with values ascending, so the
//! state list is lexicographic and reproducible.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::SystemSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    R,
    L,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::R, Polarization::L];

    pub fn flipped(self) -> Self {
        match self {
            Polarization::R => Polarization::L,
            Polarization::L => Polarization::R,
        }
    }

    fn offset(self) -> usize {
        match self {
            Polarization::R => 0,
            Polarization::L => 1,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::R => "R",
            Polarization::L => "L",
        })
    }
}

/// Absorber internal level. `X` is the excited level of a two-level absorber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    G,
    MR,
    ML,
    E,
    X,
}

impl Level {
    /// Excitation charge carried by the level.
    pub fn charge(self) -> u32 {
        match self {
            Level::G => 0,
            Level::MR | Level::ML | Level::X => 1,
            Level::E => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Level::G => "G",
            Level::MR => "MR",
            Level::ML => "ML",
            Level::E => "E",
            Level::X => "X",
        }
    }

    fn parse(s: &str) -> Option<Level> {
        Some(match s {
            "G" => Level::G,
            "MR" => Level::MR,
            "ML" => Level::ML,
            "E" => Level::E,
            "X" => Level::X,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbsorberKind {
    /// Ground and one excited level, coupled only to photons of `polarization`.
    TwoLevel { polarization: Polarization },
    /// Ground plus one middle level per polarization.
    VType,
    /// Ground, two middle levels and a two-photon excited level.
    Diamond,
}

impl AbsorberKind {
    pub fn levels(self) -> &'static [Level] {
        match self {
            AbsorberKind::TwoLevel { .. } => &[Level::G, Level::X],
            AbsorberKind::VType => &[Level::G, Level::MR, Level::ML],
            AbsorberKind::Diamond => &[Level::G, Level::MR, Level::ML, Level::E],
        }
    }

    pub fn max_charge(self) -> u32 {
        self.levels().iter().map(|l| l.charge()).max().unwrap_or(0)
    }
}

/// An absorber attached to one waveguide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Site {
    pub waveguide: usize,
    pub kind: AbsorberKind,
}

/// Shape of the mode/site register, independent of couplings and energies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub waveguides: usize,
    pub sites: Vec<Site>,
}

impl Layout {
    pub fn from_spec(spec: &SystemSpec) -> Self {
        let sites = spec
            .absorbers
            .iter()
            .enumerate()
            .filter_map(|(w, k)| k.map(|kind| Site { waveguide: w, kind }))
            .collect();
        Layout {
            waveguides: spec.waveguides,
            sites,
        }
    }

    pub fn modes(&self) -> usize {
        2 * self.waveguides
    }

    pub fn mode(waveguide: usize, pol: Polarization) -> usize {
        2 * waveguide + pol.offset()
    }

    /// Site index of the absorber on `waveguide`, if any.
    pub fn site_on(&self, waveguide: usize) -> Option<usize> {
        self.sites.iter().position(|s| s.waveguide == waveguide)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    /// Photon count per mode, indexed by [`Layout::mode`].
    pub occupations: Vec<u8>,
    /// One level per absorber site.
    pub levels: Vec<Level>,
}

impl BasisState {
    pub fn charge(&self) -> u32 {
        self.photons() + self.levels.iter().map(|l| l.charge()).sum::<u32>()
    }

    pub fn photons(&self) -> u32 {
        self.occupations.iter().map(|&n| n as u32).sum()
    }

    pub fn occupation(&self, waveguide: usize, pol: Polarization) -> u8 {
        self.occupations[Layout::mode(waveguide, pol)]
    }

    pub fn photons_in(&self, waveguide: usize) -> u32 {
        Polarization::BOTH
            .iter()
            .map(|&p| self.occupation(waveguide, p) as u32)
            .sum()
    }

    pub fn absorbers_ground(&self) -> bool {
        self.levels.iter().all(|&l| l == Level::G)
    }

    /// Exactly one photon in every waveguide and every absorber in `G`.
    pub fn is_anti_bunched(&self) -> bool {
        let waveguides = self.occupations.len() / 2;
        self.absorbers_ground() && (0..waveguides).all(|w| self.photons_in(w) == 1)
    }

    /// Some waveguide holds two or more photons while all absorbers are in `G`.
    pub fn is_bunched(&self) -> bool {
        let waveguides = self.occupations.len() / 2;
        self.absorbers_ground() && (0..waveguides).any(|w| self.photons_in(w) >= 2)
    }

    /// Canonical label, e.g. `R.L|G.G` or `RL.0|E.G`.
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Inverse of [`BasisState::label`].
    pub fn parse(label: &str) -> Result<Self> {
        let bad = |reason: &str| Error::BadLabel {
            label: label.to_string(),
            reason: reason.to_string(),
        };
        let (photons, levels) = label.split_once('|').ok_or_else(|| bad("missing '|'"))?;
        let mut occupations = Vec::new();
        for part in photons.split('.') {
            let (mut r, mut l) = (0u8, 0u8);
            if part != "0" {
                if part.is_empty() {
                    return Err(bad("empty waveguide field"));
                }
                for c in part.chars() {
                    match c {
                        'R' if l == 0 => r += 1,
                        'L' => l += 1,
                        _ => return Err(bad("waveguide field must match R*L* or 0")),
                    }
                }
            }
            occupations.push(r);
            occupations.push(l);
        }
        let levels = if levels.is_empty() {
            Vec::new()
        } else {
            levels
                .split('.')
                .map(|s| Level::parse(s).ok_or_else(|| bad("unknown level")))
                .collect::<Result<_>>()?
        };
        Ok(BasisState {
            occupations,
            levels,
        })
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, pair) in self.occupations.chunks(2).enumerate() {
            if w > 0 {
                f.write_str(".")?;
            }
            if pair[0] == 0 && pair[1] == 0 {
                f.write_str("0")?;
            }
            for _ in 0..pair[0] {
                f.write_str("R")?;
            }
            for _ in 0..pair[1] {
                f.write_str("L")?;
            }
        }
        f.write_str("|")?;
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(l.symbol())?;
        }
        Ok(())
    }
}

/// One charge sector of the Fock ⊗ absorber space. Immutable once built.
#[derive(Clone, Debug)]
pub struct HilbertSpace {
    layout: Layout,
    charge: u32,
    cap: u8,
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl HilbertSpace {
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn charge(&self) -> u32 {
        self.charge
    }

    pub fn cap(&self) -> u8 {
        self.cap
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &BasisState {
        &self.states[i]
    }

    pub fn index_of(&self, s: &BasisState) -> Result<usize> {
        self.index
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnknownState(s.label()))
    }

    pub fn index_of_label(&self, label: &str) -> Result<usize> {
        self.index_of(&BasisState::parse(label)?)
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(BasisState::label).collect()
    }
}

/// Largest charge representable under the photon caps.
pub fn max_charge(layout: &Layout, cap: u8) -> u32 {
    layout.modes() as u32 * cap as u32
        + layout.sites.iter().map(|s| s.kind.max_charge()).sum::<u32>()
}

/// Enumerate every basis state of excitation charge `charge`.
pub fn enumerate_sector(spec: &SystemSpec, charge: u32) -> Result<HilbertSpace> {
    spec.validate()?;
    let layout = Layout::from_spec(spec);
    let cap = spec.photon_cap.unwrap_or(charge.min(u8::MAX as u32) as u8);
    let max = max_charge(&layout, cap);
    if charge > max {
        return Err(Error::ChargeTooLarge { charge, max });
    }

    let mut states = Vec::new();
    let mut occupations = vec![0u8; layout.modes()];
    let mut levels = vec![Level::G; layout.sites.len()];
    fill_modes(&layout, cap, 0, charge, &mut occupations, &mut levels, &mut states);

    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(HilbertSpace {
        layout,
        charge,
        cap,
        states,
        index,
    })
}

fn fill_modes(
    layout: &Layout,
    cap: u8,
    mode: usize,
    remaining: u32,
    occupations: &mut [u8],
    levels: &mut [Level],
    out: &mut Vec<BasisState>,
) {
    if mode == occupations.len() {
        fill_sites(layout, 0, remaining, occupations, levels, out);
        return;
    }
    for n in 0..=cap.min(remaining.min(u8::MAX as u32) as u8) {
        occupations[mode] = n;
        fill_modes(layout, cap, mode + 1, remaining - n as u32, occupations, levels, out);
    }
    occupations[mode] = 0;
}

fn fill_sites(
    layout: &Layout,
    site: usize,
    remaining: u32,
    occupations: &[u8],
    levels: &mut [Level],
    out: &mut Vec<BasisState>,
) {
    if site == levels.len() {
        if remaining == 0 {
            out.push(BasisState {
                occupations: occupations.to_vec(),
                levels: levels.to_vec(),
            });
        }
        return;
    }
    for &level in layout.sites[site].kind.levels() {
        if level.charge() <= remaining {
            levels[site] = level;
            fill_sites(layout, site + 1, remaining - level.charge(), occupations, levels, out);
        }
    }
    levels[site] = Level::G;
}
