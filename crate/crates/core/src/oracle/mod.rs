//! Exact Gaussian simulation of probes coupled to a lattice field.
//!
//! A massive scalar on a one-dimensional lattice is coupled bilinearly to
//! one or more probes, each either a single oscillator or a confined chain
//! with many normal modes. All Hamiltonians are quadratic, so the joint
//! vacuum stays Gaussian and its covariance can be propagated exactly (up to
//! the integrator). Comparing the detector negativity with the leading-order
//! prediction measures the size of the neglected higher orders.

mod evolve;
mod gaussian;
mod lattice;
mod perturbative;


pub use evolve::{
    default_step, evolve_covariance, evolve_system, exact_detector_covariance, LatticeSystem, DEFAULT_PHASE_STEP,
    MAX_PHASE_STEP,
};
pub use gaussian::{gaussian_negativity, symplectic_eigenvalues, symplectic_form, two_mode_squeezed, CovarianceState};
pub use lattice::{
    chain_normal_modes, gaussian_profile, normal_modes, participation_ratio, Boundary, LatticeModel, LatticeProbe,
    ProbeChain, ProbeModes,
};
pub use perturbative::perturbative_prediction;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residuals below this are indistinguishable from integration noise.
pub const NOISE_FLOOR: f64 = 1e-13;

/// One coupling strength of a scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub lambda: f64,
    pub exact: f64,
    pub reference: f64,
    pub residual: f64,
}

/// Least-squares fit of `log residual = intercept + slope · log λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Number of points above [`NOISE_FLOOR`] that entered the fit.
    pub used: usize,
    pub points: Vec<ScalingPoint>,
}

/// Fits the points whose residual exceeds [`NOISE_FLOOR`].
pub fn fit_log_log(points: Vec<ScalingPoint>) -> Result<ScalingFit> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.residual > NOISE_FLOOR && p.lambda > 0.0)
        .map(|p| (p.lambda.ln(), p.residual.ln()))
        .collect();
    if usable.is_empty() {
        let max = points.iter().map(|p| p.residual).fold(0.0, f64::max);
        return Err(Error::BelowNoise(max));
    }
    if usable.len() < 2 {
        return Err(Error::DegenerateFit("fewer than two residuals above the noise floor".into()));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("all usable couplings are equal".into()));
    }
    let slope = sxy / sxx;
    Ok(ScalingFit {
        slope,
        intercept: my - slope * mx,
        used: usable.len(),
        points,
    })
}

/// Negativity of the exact detector state, coupling both probes with `lambda`.
pub fn exact_negativity(model: &LatticeModel, lambda: f64, dt: Option<f64>) -> Result<f64> {
    gaussian_negativity(&exact_detector_covariance(&model.with_coupling(lambda), dt)?)
}

/// `|N_exact(λ) - N_pert(λ)|` at each coupling in `lambdas`.
///
/// The leading-order negativity is evaluated once at unit coupling and
/// rescaled by `λ²`.
pub fn residual_points(model: &LatticeModel, lambdas: &[f64]) -> Result<Vec<ScalingPoint>> {
    let unit = perturbative_prediction(&model.with_coupling(1.0))?;
    lambdas
        .iter()
        .map(|&lambda| {
            let exact = exact_negativity(model, lambda, None)?;
            let reference = unit.negativity * lambda * lambda;
            Ok(ScalingPoint {
                lambda,
                exact,
                reference,
                residual: (exact - reference).abs(),
            })
        })
        .collect()
}

/// Log–log slope of [`residual_points`].
pub fn residual_scaling(model: &LatticeModel, lambdas: &[f64]) -> Result<ScalingFit> {
    fit_log_log(residual_points(model, lambdas)?)
}

/// Compares a model with multimode probe chains to its single-mode
/// truncation. The residual is the largest entry of the difference of the
/// two detector covariances; `exact` and `reference` hold the two
/// negativities.
pub fn multimode_points(model: &LatticeModel, lambdas: &[f64]) -> Result<Vec<ScalingPoint>> {
    if !model.probes.iter().any(|p| matches!(p.modes, ProbeModes::Chain(_))) {
        return Err(Error::InconsistentInput("the model has no probe chains to truncate".into()));
    }
    let truncated = model.single_mode_truncation()?;
    lambdas
        .iter()
        .map(|&lambda| {
            let full = exact_detector_covariance(&model.with_coupling(lambda), None)?;
            let single = exact_detector_covariance(&truncated.with_coupling(lambda), None)?;
            Ok(ScalingPoint {
                lambda,
                exact: gaussian_negativity(&full)?,
                reference: gaussian_negativity(&single)?,
                residual: (&full.matrix - &single.matrix).amax(),
            })
        })
        .collect()
}

/// Log–log slope of [`multimode_points`].
pub fn multimode_scaling(model: &LatticeModel, lambdas: &[f64]) -> Result<ScalingFit> {
    fit_log_log(multimode_points(model, lambdas)?)
}
