use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smearing::SwitchingSpec;

/// Tolerance on the Euclidean norm of a single-mode profile.
const PROFILE_NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    Dirichlet,
}

/// A probe field confined to a window of the lattice. Its on-site values
/// `V_j` enter the stiffness matrix as `2 V_j`, and the window edges are
/// clamped (Dirichlet). The lowest normal mode plays the detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeChain {
    pub first_site: usize,
    pub probe_mass: f64,
    pub potential: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeModes {
    /// One oscillator with frequency `gap` coupled through a unit-norm site profile.
    SingleMode { gap: f64, profile: Vec<f64> },
    /// Every normal mode of a confined probe chain.
    Chain(ProbeChain),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeProbe {
    pub coupling: f64,
    pub switching: SwitchingSpec,
    pub modes: ProbeModes,
}

/// A massive scalar field on a one-dimensional lattice with linearly coupled probes.
///
/// The coupling is `λ ζ(t) Σ_j q^D_j q_j`, the lattice form of
/// `λ ζ(t) ∫ φ_D φ dx` with `q_j = sqrt(a) φ(x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeModel {
    pub n_sites: usize,
    pub spacing: f64,
    pub target_mass: f64,
    pub boundary: Boundary,
    pub probes: Vec<LatticeProbe>,
}

impl LatticeModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let model: LatticeModel = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::param("n_sites", "need at least two sites"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::param("spacing", "must be positive and finite"));
        }
        if !(self.target_mass > 0.0 && self.target_mass.is_finite()) {
            return Err(Error::param("target_mass", "must be positive and finite"));
        }
        for probe in &self.probes {
            if !probe.coupling.is_finite() {
                return Err(Error::param("probes.coupling", "must be finite"));
            }
            probe.switching.validate()?;
            match &probe.modes {
                ProbeModes::SingleMode { gap, profile } => {
                    if !(*gap > 0.0 && gap.is_finite()) {
                        return Err(Error::param("probes.modes.gap", "must be positive and finite"));
                    }
                    if profile.len() != self.n_sites {
                        return Err(Error::param(
                            "probes.modes.profile",
                            format!("expected {} entries, got {}", self.n_sites, profile.len()),
                        ));
                    }
                    let norm = profile.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if !((norm - 1.0).abs() <= PROFILE_NORM_TOL) {
                        return Err(Error::param("probes.modes.profile", format!("must have unit norm, got {norm}")));
                    }
                }
                ProbeModes::Chain(chain) => {
                    if chain.potential.is_empty() {
                        return Err(Error::param("probes.modes.potential", "must cover at least one site"));
                    }
                    if chain.first_site + chain.potential.len() > self.n_sites {
                        return Err(Error::param("probes.modes.first_site", "chain window leaves the lattice"));
                    }
                    if !(chain.probe_mass >= 0.0 && chain.probe_mass.is_finite()) {
                        return Err(Error::param("probes.modes.probe_mass", "must be non-negative and finite"));
                    }
                    if chain.potential.iter().any(|v| !v.is_finite()) {
                        return Err(Error::param("probes.modes.potential", "must be finite"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Copy with every probe coupling set to `lambda`.
    pub fn with_coupling(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.probes {
            p.coupling = lambda;
        }
        out
    }

    /// Replaces every probe chain by its lowest normal mode, keeping the
    /// coupling and switching.
    pub fn single_mode_truncation(&self) -> Result<Self> {
        let mut out = self.clone();
        for p in &mut out.probes {
            if let ProbeModes::Chain(_) = &p.modes {
                let modes = probe_modes(p, self)?;
                let (gap, profile) = modes.into_iter().next().expect("chains have at least one mode");
                p.modes = ProbeModes::SingleMode {
                    gap,
                    profile: profile.iter().copied().collect(),
                };
            }
        }
        Ok(out)
    }
}

/// Normal modes of a chain with stiffness `m² + 2V_j + (2 - shifts)/a²`.
///
/// Returns the frequencies in ascending order and the orthonormal profiles as
/// matrix columns.
pub fn chain_normal_modes(
    n: usize,
    spacing: f64,
    mass: f64,
    potential: &[f64],
    boundary: Boundary,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if n == 0 {
        return Err(Error::param("n_sites", "chain is empty"));
    }
    if !potential.is_empty() && potential.len() != n {
        return Err(Error::param("potential", format!("expected {n} entries, got {}", potential.len())));
    }
    let inv_a2 = 1.0 / (spacing * spacing);
    let mut k = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let v = potential.get(j).copied().unwrap_or(0.0);
        k[(j, j)] = mass * mass + 2.0 * v + 2.0 * inv_a2;
        if j + 1 < n {
            k[(j, j + 1)] -= inv_a2;
            k[(j + 1, j)] -= inv_a2;
        }
    }
    if boundary == Boundary::Periodic && n > 1 {
        if n == 2 {
            k[(0, 1)] -= inv_a2;
            k[(1, 0)] -= inv_a2;
        } else {
            k[(0, n - 1)] -= inv_a2;
            k[(n - 1, 0)] -= inv_a2;
        }
    }
    let eig = SymmetricEigen::new(k);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lowest = eig.eigenvalues[order[0]];
    if lowest <= 0.0 {
        return Err(Error::UnstablePotential(lowest));
    }
    let freqs = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i].sqrt()));
    let mut profiles = DMatrix::<f64>::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        profiles.set_column(c, &eig.eigenvectors.column(i));
    }
    Ok((freqs, profiles))
}

/// Normal modes of the target field.
pub fn normal_modes(model: &LatticeModel) -> Result<(DVector<f64>, DMatrix<f64>)> {
    model.validate()?;
    chain_normal_modes(model.n_sites, model.spacing, model.target_mass, &[], model.boundary)
}

/// Frequencies and target-site coupling vectors of every oscillator a probe contributes.
pub(crate) fn probe_modes(probe: &LatticeProbe, model: &LatticeModel) -> Result<Vec<(f64, DVector<f64>)>> {
    match &probe.modes {
        ProbeModes::SingleMode { gap, profile } => Ok(vec![(*gap, DVector::from_column_slice(profile))]),
        ProbeModes::Chain(chain) => {
            let w = chain.potential.len();
            let (freqs, prof) =
                chain_normal_modes(w, model.spacing, chain.probe_mass, &chain.potential, Boundary::Dirichlet)?;
            Ok((0..w)
                .map(|n| {
                    let mut v = DVector::zeros(model.n_sites);
                    v.rows_mut(chain.first_site, w).copy_from(&prof.column(n));
                    (freqs[n], v)
                })
                .collect())
        }
    }
}

/// Participation ratio `1 / Σ v_j⁴` of a unit vector.
pub fn participation_ratio(v: &[f64]) -> f64 {
    1.0 / v.iter().map(|x| x.powi(4)).sum::<f64>()
}

/// Unit-norm Gaussian site profile of width `width` centred on `center` (in sites).
pub fn gaussian_profile(n_sites: usize, spacing: f64, center: f64, width: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n_sites)
        .map(|j| {
            let x = (j as f64 - center) * spacing;
            (-0.5 * (x / width).powi(2)).exp()
        })
        .collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    raw.into_iter().map(|v| v / norm).collect()
}
