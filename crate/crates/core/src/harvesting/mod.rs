//! Leading-order state of two probe modes after interacting with the vacuum.
//!
//! With `F̃_I` the spatial transform of detector I's mode (trap position
//! included), `ν = Ω + ω_k`, and the measure `dμ(k) = d³k / ((2π)³ 2ω_k)`:
//!
//! * `L_IJ = λ_I λ_J ∫dμ |χ̃(ν)|² e^{iν(c_I - c_J)} F̃_I(k) conj(F̃_J(k))`
//! * `K_I  = +λ_I² ∫dμ J_II(Ω, ω_k) |F̃_I(k)|²`
//! * `M    = -λ_A λ_B ∫dμ J_AB(Ω, ω_k) conj(F̃_A(k)) F̃_B(k)`
//!
//! where `c_I` are switching peak times and `J` is the time-ordered kernel of
//! [`crate::kernels`]. `L_IJ` is the matrix element `⟨1_I 0|ρ|0 1_J⟩`,
//! i.e. the off-diagonal entry of the one-excitation block.
//!
//! All integrals are reduced to a radial integral over `|k|` of an angular
//! average; see [`engine::PairIntegrator`].

mod angular;
mod engine;

use nalgebra::{Complex, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use engine::{PairIntegrator, Term};

use crate::error::{Error, Result};
use crate::kernels::{QuadratureSettings, TargetFieldSpec};
use crate::smearing::DetectorSpec;

/// Estimated absolute quadrature error of each scalar in a [`HarvestingResult`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorBounds {
    pub l_aa: f64,
    pub l_bb: f64,
    pub l_ab: f64,
    pub k_a: f64,
    pub k_b: f64,
    pub m: f64,
    pub comm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarvestingResult {
    pub l_aa: f64,
    pub l_bb: f64,
    pub l_ab: Complex64,
    pub k_a: Complex64,
    pub k_b: Complex64,
    pub m: Complex64,
    pub negativity: f64,
    /// `|M - M_sym|`, the part of `M` carried by the field commutator.
    pub comm_estimate: f64,
    /// `comm_estimate / |M|` (zero when `M` vanishes).
    pub comm_ratio: f64,
    pub errors: ErrorBounds,
}

impl HarvestingResult {
    /// Builds a result from the six scalars, deriving the negativity. The
    /// communication estimate and error bounds are zero.
    pub fn from_scalars(
        l_aa: f64,
        l_bb: f64,
        l_ab: Complex64,
        k_a: Complex64,
        k_b: Complex64,
        m: Complex64,
    ) -> Result<Self> {
        let negativity = negativity_closed(l_aa, l_bb, m)?;
        Ok(HarvestingResult {
            l_aa,
            l_bb,
            l_ab,
            k_a,
            k_b,
            m,
            negativity,
            comm_estimate: 0.0,
            comm_ratio: 0.0,
            errors: ErrorBounds::default(),
        })
    }

    /// Same state with the roles of A and B exchanged.
    pub fn swapped(&self) -> Self {
        HarvestingResult {
            l_aa: self.l_bb,
            l_bb: self.l_aa,
            l_ab: self.l_ab.conj(),
            k_a: self.k_b,
            k_b: self.k_a,
            errors: ErrorBounds {
                l_aa: self.errors.l_bb,
                l_bb: self.errors.l_aa,
                k_a: self.errors.k_b,
                k_b: self.errors.k_a,
                ..self.errors
            },
            ..*self
        }
    }
}

/// Dimension of the truncated two-mode Fock space (levels 0, 1, 2 per mode).
pub const PAIR_DIM: usize = 9;

pub type PairMatrix = SMatrix<Complex<f64>, PAIR_DIM, PAIR_DIM>;

/// Joint detector state in the basis `|n_A n_B⟩` ordered
/// `00, 01, 02, 10, 11, 12, 20, 21, 22` (index `3 n_A + n_B`).
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorPairState {
    pub matrix: PairMatrix,
}

pub const fn basis_index(n_a: usize, n_b: usize) -> usize {
    3 * n_a + n_b
}

/// Fills the leading-order density matrix from the harvesting scalars.
pub fn assemble_rho(r: &HarvestingResult) -> Result<DetectorPairState> {
    let scalars = [
        Complex64::new(r.l_aa, 0.0),
        Complex64::new(r.l_bb, 0.0),
        r.l_ab,
        r.k_a,
        r.k_b,
        r.m,
    ];
    if scalars.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InconsistentInput("harvesting scalars must be finite".into()));
    }
    let mut rho = PairMatrix::zeros();
    let s00 = basis_index(0, 0);
    let s01 = basis_index(0, 1);
    let s02 = basis_index(0, 2);
    let s10 = basis_index(1, 0);
    let s11 = basis_index(1, 1);
    let s20 = basis_index(2, 0);

    rho[(s00, s00)] = Complex64::new(1.0 - r.l_aa - r.l_bb, 0.0);
    rho[(s01, s01)] = Complex64::new(r.l_bb, 0.0);
    rho[(s10, s10)] = Complex64::new(r.l_aa, 0.0);
    set_pair(&mut rho, s01, s10, r.l_ab.conj());
    set_pair(&mut rho, s00, s02, r.k_b.conj());
    set_pair(&mut rho, s00, s20, r.k_a.conj());
    set_pair(&mut rho, s00, s11, r.m.conj());

    let trace: f64 = (0..PAIR_DIM).map(|i| rho[(i, i)].re).sum();
    if (trace - 1.0).abs() > 1e-9 {
        return Err(Error::InconsistentInput(format!("trace deviates from 1 by {:e}", trace - 1.0)));
    }
    Ok(DetectorPairState { matrix: rho })
}

fn set_pair(rho: &mut PairMatrix, row: usize, col: usize, value: Complex64) {
    rho[(row, col)] = value;
    rho[(col, row)] = value.conj();
}

/// Closed-form negativity of the leading-order state:
/// `max(0, sqrt(|M|² + ((L_AA - L_BB)/2)²) - (L_AA + L_BB)/2)`.
///
/// This is minus the smaller eigenvalue of the partially transposed
/// one-excitation block `[[L_BB, conj M], [M, L_AA]]`.
pub fn negativity_closed(l_aa: f64, l_bb: f64, m: Complex64) -> Result<f64> {
    if l_aa < 0.0 || l_bb < 0.0 {
        return Err(Error::Domain(format!(
            "local terms must be non-negative, got L_AA = {l_aa}, L_BB = {l_bb}"
        )));
    }
    let half_diff = 0.5 * (l_aa - l_bb);
    let root = m.norm().hypot(half_diff);
    Ok((root - 0.5 * (l_aa + l_bb)).max(0.0))
}

/// Partial transpose on the B factor.
pub fn partial_transpose_b(rho: &DetectorPairState) -> PairMatrix {
    let mut out = PairMatrix::zeros();
    for a in 0..3 {
        for b in 0..3 {
            for ap in 0..3 {
                for bp in 0..3 {
                    out[(basis_index(a, b), basis_index(ap, bp))] = rho.matrix[(basis_index(a, bp), basis_index(ap, b))];
                }
            }
        }
    }
    out
}

/// Sum of the magnitudes of the negative eigenvalues of `ρ^{T_B}`.
pub fn negativity_from_rho(rho: &DetectorPairState) -> f64 {
    let pt = partial_transpose_b(rho);
    let eig = pt.symmetric_eigenvalues();
    eig.iter().filter(|&&v| v < 0.0).map(|v| -v).sum()
}

/// `L_IJ`. Self terms (`I = J`) are real and non-negative.
pub fn compute_l(di: &DetectorSpec, dj: &DetectorSpec, f: &TargetFieldSpec, q: &QuadratureSettings) -> Result<Complex64> {
    let mut p = PairIntegrator::new(di, dj, f, q)?;
    let term = if di == dj { Term::LocalAA } else { Term::LocalAB };
    Ok(p.term(term, None)?.value)
}

/// `M` for the ordered pair (A, B).
pub fn compute_m(da: &DetectorSpec, db: &DetectorSpec, f: &TargetFieldSpec, q: &QuadratureSettings) -> Result<Complex64> {
    let mut p = PairIntegrator::new(da, db, f, q)?;
    Ok(p.term(Term::NonLocal, None)?.value)
}

/// `K` of a single detector.
pub fn compute_k(d: &DetectorSpec, f: &TargetFieldSpec, q: &QuadratureSettings) -> Result<Complex64> {
    let mut p = PairIntegrator::new(d, d, f, q)?;
    Ok(p.term(Term::SelfA, None)?.value)
}

/// `|M - M_sym|`, with `M_sym` the same integral using the symmetrised
/// (anticommutator) time kernel.
pub fn communication_estimate(
    da: &DetectorSpec,
    db: &DetectorSpec,
    f: &TargetFieldSpec,
    q: &QuadratureSettings,
) -> Result<f64> {
    let mut p = PairIntegrator::new(da, db, f, q)?;
    Ok(p.term(Term::Commutator, None)?.value.norm())
}

/// Every scalar of the leading-order state for one detector pair.
pub fn harvest(da: &DetectorSpec, db: &DetectorSpec, f: &TargetFieldSpec, q: &QuadratureSettings) -> Result<HarvestingResult> {
    PairIntegrator::new(da, db, f, q)?.evaluate(None)
}

#[cfg(test)]
mod tests;
