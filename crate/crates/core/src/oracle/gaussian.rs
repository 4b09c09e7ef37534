use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
/// Slack allowed on the uncertainty relation before a covariance is called unphysical.
const PHYSICAL_TOL: f64 = 1e-9;

/// Zero-mean Gaussian state in `(q₁, p₁, …, q_n, p_n)` ordering.
///
/// The vacuum is `½·I`, so the uncertainty relation reads `σ + (i/2)Ω ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    pub matrix: DMatrix<f64>,
    pub means: DVector<f64>,
}

impl CovarianceState {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 || d % 2 != 0 || matrix.ncols() != d {
            return Err(Error::InconsistentInput(format!(
                "covariance must be square with even size, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InconsistentInput("covariance entries must be finite".into()));
        }
        let scale = matrix.amax().max(1.0);
        let asym = (&matrix - matrix.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::InconsistentInput(format!("covariance is not symmetric (defect {asym:e})")));
        }
        Ok(CovarianceState {
            means: DVector::zeros(d),
            matrix,
        })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        CovarianceState {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
            means: DVector::zeros(2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Covariance of the listed modes, in the given order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        let n = self.n_modes();
        if let Some(&bad) = modes.iter().find(|&&m| m >= n) {
            return Err(Error::InconsistentInput(format!("mode {bad} out of range for {n} modes")));
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let d = idx.len();
        let matrix = DMatrix::from_fn(d, d, |i, j| self.matrix[(idx[i], idx[j])]);
        Ok(CovarianceState {
            means: DVector::zeros(d),
            matrix,
        })
    }

    /// Smallest eigenvalue of the Hermitian matrix `σ + (i/2)Ω`.
    ///
    /// Computed from the real embedding `[[σ, -Ω/2], [Ω/2, σ]]`, whose spectrum
    /// is that of the Hermitian matrix with every eigenvalue doubled.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let d = self.matrix.nrows();
        let omega = symplectic_form(d / 2);
        let mut big = DMatrix::<f64>::zeros(2 * d, 2 * d);
        big.view_mut((0, 0), (d, d)).copy_from(&self.matrix);
        big.view_mut((d, d), (d, d)).copy_from(&self.matrix);
        big.view_mut((0, d), (d, d)).copy_from(&(&omega * -0.5));
        big.view_mut((d, 0), (d, d)).copy_from(&(&omega * 0.5));
        SymmetricEigen::new(big).eigenvalues.min()
    }

    /// Determinant of the covariance, `4^{-n}` for pure states.
    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }
}

/// `⊕ [[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..n_modes {
        o[(2 * i, 2 * i + 1)] = 1.0;
        o[(2 * i + 1, 2 * i)] = -1.0;
    }
    o
}

/// Symplectic eigenvalues in ascending order, or `None` if `m` is not
/// positive definite.
///
/// With `K = m^{1/2} Ω m^{1/2}` real antisymmetric, `KᵀK` is symmetric with
/// eigenvalues `ν_j²`, each twice. Going through a symmetric eigenproblem
/// keeps near-degenerate pairs accurate, which the closed two-mode formula
/// does not.
pub fn symplectic_eigenvalues(m: &DMatrix<f64>) -> Option<Vec<f64>> {
    let n = m.nrows() / 2;
    let eig = SymmetricEigen::new(m.clone());
    if eig.eigenvalues.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let k = &root * symplectic_form(n) * &root;
    let mut sq: Vec<f64> = SymmetricEigen::new(k.tr_mul(&k)).eigenvalues.iter().copied().collect();
    sq.sort_by(f64::total_cmp);
    Some(sq.chunks(2).map(|p| (0.5 * (p[0] + p[1])).max(0.0).sqrt()).collect())
}

fn det2(m: &DMatrix<f64>, r: usize, c: usize) -> f64 {
    m[(r, c)] * m[(r + 1, c + 1)] - m[(r, c + 1)] * m[(r + 1, c)]
}

/// Smaller symplectic eigenvalue of a two-mode covariance.
///
/// The invariant formula `ν₋² = det σ / ν₊²`, `ν₊² = (Δ + sqrt(Δ² - 4 det σ)) / 2`
/// is accurate unless the two eigenvalues nearly coincide, where the square
/// root loses half the digits. That case falls back to
/// [`symplectic_eigenvalues`], which is accurate there.
fn smallest_two_mode(m: &DMatrix<f64>) -> f64 {
    let delta = det2(m, 0, 0) + det2(m, 2, 2) + 2.0 * det2(m, 0, 2);
    let det = m.determinant();
    let disc_sq = delta * delta - 4.0 * det;
    if delta > 0.0 && det > 0.0 && disc_sq > 1e-6 * delta * delta {
        let plus_sq = 0.5 * (delta + disc_sq.sqrt());
        return (det / plus_sq).sqrt();
    }
    symplectic_eigenvalues(m).map_or(0.0, |v| v[0])
}

/// Logarithm-free negativity of a two-mode Gaussian state.
///
/// With `ν̃` the smaller symplectic eigenvalue of the partial transpose,
/// rescaled so the vacuum has `ν̃ = 1`, the result is `max(0, (1 - ν̃) / (2ν̃))`.
/// A two-mode squeezed vacuum with parameter `s` gives `(e^{2s} - 1) / 2`.
pub fn gaussian_negativity(state: &CovarianceState) -> Result<f64> {
    let m = &state.matrix;
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::InconsistentInput(format!(
            "expected a two-mode covariance, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let nu_minus = smallest_two_mode(m);
    if nu_minus < 0.5 - PHYSICAL_TOL {
        return Err(Error::Domain(format!(
            "covariance violates the uncertainty relation (smallest symplectic eigenvalue {nu_minus})"
        )));
    }
    // Partial transpose: flip the sign of the second mode's momentum.
    let mut pt = m.clone();
    pt.row_mut(3).neg_mut();
    pt.column_mut(3).neg_mut();
    let nu = 2.0 * smallest_two_mode(&pt);
    if nu <= 0.0 {
        return Err(Error::Domain("partial transpose has a vanishing symplectic eigenvalue".into()));
    }
    Ok(((1.0 - nu) / (2.0 * nu)).max(0.0))
}

/// Two-mode squeezed vacuum with squeezing `s`.
pub fn two_mode_squeezed(s: f64) -> CovarianceState {
    let c = 0.5 * (2.0 * s).cosh();
    let sh = 0.5 * (2.0 * s).sinh();
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, 0.0, sh, 0.0,
        0.0, c, 0.0, -sh,
        sh, 0.0, c, 0.0,
        0.0, -sh, 0.0, c,
    ]);
    CovarianceState {
        matrix: m,
        means: DVector::zeros(4),
    }
}
