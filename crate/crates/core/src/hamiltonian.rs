//! Sector-restricted Hamiltonian `H(t) = H₀ + θ(t)·H_θ + λ(t)·H_λ`.
//!
//! `H_θ` hops photons between neighbouring waveguides with polarization
//! preserved. `H_λ` couples each waveguide to its absorber:
//!
//! | kind      | absorption                                           |
//! |-----------|------------------------------------------------------|
//! | diamond   | G→M_R (R), G→M_L (L), M_R→E (L), M_L→E (R)           |
//! | V-type    | G→M_R (R), G→M_L (L)                                 |
//! | two-level | G→X (its polarization)                               |
//!
//! plus the Hermitian conjugate emission terms.

use num_complex::Complex64;

use crate::basis::{AbsorberKind, BasisState, HilbertSpace, Layout, Level, Polarization};
use crate::error::{Error, Result};
use crate::ramp::Coupling;
use crate::sparse::CsrMatrix;
use crate::system::{Frame, SystemSpec};

#[derive(Clone, Debug)]
pub struct HamiltonianBlocks {
    /// Diagonal of H₀ in the configured frame.
    h0: Vec<f64>,
    h_theta: CsrMatrix,
    h_lambda: CsrMatrix,
    fused: FusedPattern,
}

/// Union sparsity pattern of `H_θ` and `H_λ` for the integrator's inner loop.
#[derive(Clone, Debug)]
struct FusedPattern {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    theta: Vec<f64>,
    lambda: Vec<f64>,
}

impl FusedPattern {
    fn new(h_theta: &CsrMatrix, h_lambda: &CsrMatrix) -> Self {
        let n = h_theta.dim();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut theta = Vec::new();
        let mut lambda = Vec::new();
        for i in 0..n {
            let mut entries: Vec<(usize, f64, f64)> = h_theta.row(i).map(|(j, v)| (j, v, 0.0)).collect();
            for (j, v) in h_lambda.row(i) {
                match entries.iter_mut().find(|e| e.0 == j) {
                    Some(e) => e.2 = v,
                    None => entries.push((j, 0.0, v)),
                }
            }
            entries.sort_by_key(|e| e.0);
            for (j, t, l) in entries {
                cols.push(j);
                theta.push(t);
                lambda.push(l);
            }
            row_ptr.push(cols.len());
        }
        FusedPattern {
            row_ptr,
            cols,
            theta,
            lambda,
        }
    }
}

impl HamiltonianBlocks {
    pub fn dim(&self) -> usize {
        self.h0.len()
    }

    pub fn h0_diagonal(&self) -> &[f64] {
        &self.h0
    }

    pub fn h0(&self) -> CsrMatrix {
        CsrMatrix::from_diagonal(&self.h0)
    }

    pub fn h_theta(&self) -> &CsrMatrix {
        &self.h_theta
    }

    pub fn h_lambda(&self) -> &CsrMatrix {
        &self.h_lambda
    }

    /// `out = (H₀ + θ·H_θ + λ·H_λ)·ψ`.
    pub fn apply(&self, theta: f64, lambda: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let f = &self.fused;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = psi[i] * self.h0[i];
            for k in f.row_ptr[i]..f.row_ptr[i + 1] {
                acc += psi[f.cols[k]] * (theta * f.theta[k] + lambda * f.lambda[k]);
            }
            *o = acc;
        }
    }

    /// Cheap upper bound on ‖H‖ at peak couplings: max absolute row sum.
    pub fn norm_bound(&self, spec: &SystemSpec) -> f64 {
        let f = &self.fused;
        (0..self.dim())
            .map(|i| {
                self.h0[i].abs()
                    + (f.row_ptr[i]..f.row_ptr[i + 1])
                        .map(|k| (spec.theta_max * f.theta[k] + spec.lambda_max * f.lambda[k]).abs())
                        .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Coupling strengths at time `t`.
pub fn couplings_at(spec: &SystemSpec, t: f64) -> (f64, f64) {
    (
        spec.theta_max * spec.ramp.envelope(Coupling::Theta, t),
        spec.lambda_max * spec.ramp.envelope(Coupling::Lambda, t),
    )
}

pub fn build_blocks(spec: &SystemSpec, space: &HilbertSpace) -> Result<HamiltonianBlocks> {
    spec.validate()?;
    let layout = Layout::from_spec(spec);
    if &layout != space.layout() {
        return Err(Error::InvalidSystem(
            "Hilbert space was enumerated from a different system layout".into(),
        ));
    }
    let n = space.dim();
    let shift = match spec.frame {
        Frame::Lab => 0.0,
        Frame::Rotating => spec.omega * space.charge() as f64,
    };
    let h0 = space
        .states()
        .iter()
        .map(|s| {
            spec.omega * s.photons() as f64
                + s.levels.iter().map(|&l| spec.level_energy(l)).sum::<f64>()
                - shift
        })
        .collect();

    let mut hops = Vec::new();
    let mut absorptions = Vec::new();
    for (i, s) in space.states().iter().enumerate() {
        for &[u, v] in &spec.couplings {
            for pol in Polarization::BOTH {
                for (from, to) in [(u, v), (v, u)] {
                    if let Some((t, amp)) = hop(s, from, to, pol, space.cap()) {
                        if let Ok(j) = space.index_of(&t) {
                            hops.push((j, i, amp));
                        }
                    }
                }
            }
        }
        for (site, info) in layout.sites.iter().enumerate() {
            for &(lower, pol, upper) in transitions(info.kind) {
                if let Some((t, amp)) = absorb(s, site, info.waveguide, lower, pol, upper) {
                    if let Ok(j) = space.index_of(&t) {
                        absorptions.push((j, i, amp));
                        absorptions.push((i, j, amp));
                    }
                }
            }
        }
    }
    let h_theta = CsrMatrix::from_triplets(n, hops);
    let h_lambda = CsrMatrix::from_triplets(n, absorptions);
    let fused = FusedPattern::new(&h_theta, &h_lambda);
    Ok(HamiltonianBlocks {
        h0,
        h_theta,
        h_lambda,
        fused,
    })
}

/// `H₀ + θ_max·env_θ(t)·H_θ + λ_max·env_λ(t)·H_λ` as an explicit matrix.
pub fn hamiltonian_at(blocks: &HamiltonianBlocks, spec: &SystemSpec, t: f64) -> CsrMatrix {
    let (theta, lambda) = couplings_at(spec, t);
    blocks
        .h0()
        .combine(1.0, &blocks.h_theta, theta)
        .combine(1.0, &blocks.h_lambda, lambda)
}

/// Absorption transitions `(lower, photon, upper)` for each absorber kind.
fn transitions(kind: AbsorberKind) -> &'static [(Level, Polarization, Level)] {
    use Level::*;
    use Polarization::{L, R};
    match kind {
        AbsorberKind::Diamond => &[(G, R, MR), (G, L, ML), (MR, L, E), (ML, R, E)],
        AbsorberKind::VType => &[(G, R, MR), (G, L, ML)],
        AbsorberKind::TwoLevel { polarization: R } => &[(G, R, X)],
        AbsorberKind::TwoLevel { polarization: L } => &[(G, L, X)],
    }
}

/// `a†_{to,p} a_{from,p} |s⟩`.
fn hop(s: &BasisState, from: usize, to: usize, pol: Polarization, cap: u8) -> Option<(BasisState, f64)> {
    let src = Layout::mode(from, pol);
    let dst = Layout::mode(to, pol);
    let n_src = s.occupations[src];
    let n_dst = s.occupations[dst];
    if n_src == 0 || n_dst >= cap {
        return None;
    }
    let mut t = s.clone();
    t.occupations[src] -= 1;
    t.occupations[dst] += 1;
    Some((t, ((n_src as f64) * (n_dst as f64 + 1.0)).sqrt()))
}

/// `|upper⟩⟨lower| a_{w,p} |s⟩` on one absorber site.
fn absorb(
    s: &BasisState,
    site: usize,
    waveguide: usize,
    lower: Level,
    pol: Polarization,
    upper: Level,
) -> Option<(BasisState, f64)> {
    let mode = Layout::mode(waveguide, pol);
    let n = s.occupations[mode];
    if s.levels[site] != lower || n == 0 {
        return None;
    }
    let mut t = s.clone();
    t.occupations[mode] -= 1;
    t.levels[site] = upper;
    Some((t, (n as f64).sqrt()))
}
