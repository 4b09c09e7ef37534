//! Vacuum two-point data in momentum space and the temporal kernels of the
//! local (`L`) and time-ordered (`K`, `M`) terms.
//!
//! The Wightman function is taken as
//! `W(x,x') = ∫ d³k / ((2π)³ 2ω_k) e^{-iω_k(t-t') + ik·(x-x')}`
//! with `ω_k = sqrt(k² + m²)`. Every momentum integral in [`crate::harvesting`]
//! uses this measure.
//!
//! For the time-ordered kernel with Gaussian switchings of equal width `T`
//! centred at `c_A`, `c_B`, the substitution `u = t + t'`, `v = t - t'` gives
//!
//! `J = 2T e^{-Ω²T²/π} e^{iΩ(c_A + c_B)} · ½∫ e^{-π(v - Δ)²/(4T²)} e^{-iω|v|} dv`
//!
//! with `Δ = c_A - c_B`. The `u` integral is a Gaussian done in closed form;
//! the remaining `v` integral (the "lag factor") is done numerically on a
//! window of ±8T around its centre, beyond which the weight is below 1e-21.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate, Tolerance};
use crate::smearing::{switching_fourier_sq, SwitchingSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldState {
    #[default]
    MinkowskiVacuum,
}

/// Free scalar target field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetFieldSpec {
    pub mass: f64,
    #[serde(default)]
    pub state: FieldState,
}

impl TargetFieldSpec {
    pub fn massless() -> Self {
        TargetFieldSpec {
            mass: 0.0,
            state: FieldState::MinkowskiVacuum,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass >= 0.0 && self.mass.is_finite()) {
            return Err(Error::param("mass", format!("must be non-negative, got {}", self.mass)));
        }
        Ok(())
    }
}

/// How the outer momentum integrals are discretised.
///
/// * `AdaptiveGk`: adaptive Gauss–Kronrod in `|k|`; tensor Gauss–Legendre
///   over directions when the integrand is not isotropic.
/// * `TensorGl`: composite Gauss–Legendre in `|k|` refined by panel doubling.
/// * `MonteCarlo`: directions are sampled uniformly with a seeded generator;
///   the radial rule is as for `AdaptiveGk`. The reported error is the
///   sampling standard error, so tight tolerances will be rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuadratureMethod {
    AdaptiveGk,
    TensorGl,
    MonteCarlo { seed: u64, samples: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evaluations: usize,
    pub method: QuadratureMethod,
    /// Use the direction-resolved path even for isotropic detector pairs.
    #[serde(default)]
    pub force_full_3d: bool,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-7,
            abs_tol: 1e-14,
            max_evaluations: 2_000_000,
            method: QuadratureMethod::AdaptiveGk,
            force_full_3d: false,
        }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::param("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::param("abs_tol", "must be positive"));
        }
        if self.max_evaluations == 0 {
            return Err(Error::param("max_evaluations", "must be positive"));
        }
        if let QuadratureMethod::MonteCarlo { samples, .. } = self.method {
            if samples < 2 {
                return Err(Error::param("method.samples", "need at least two samples"));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance {
            abs: self.abs_tol,
            rel: self.rel_tol,
            max_evaluations: self.max_evaluations,
        }
    }

    pub fn uses_rng(&self) -> bool {
        matches!(self.method, QuadratureMethod::MonteCarlo { .. })
    }
}

/// `ω_k = sqrt(k² + m²)`.
pub fn omega_k(k: f64, f: &TargetFieldSpec) -> Result<f64> {
    if k < 0.0 || !k.is_finite() {
        return Err(Error::Domain(format!("momentum magnitude must be non-negative, got {k}")));
    }
    if k == 0.0 && f.mass == 0.0 {
        return Err(Error::IntegrableSingularity);
    }
    Ok(k.hypot(f.mass))
}

/// Temporal factor of the local terms, `|χ̃(Ω + ω)|²`.
pub fn local_time_kernel(gap: f64, omega: f64, s: &SwitchingSpec) -> f64 {
    switching_fourier_sq(s, gap + omega)
}

/// Which part of the time-ordered kernel to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagPart {
    /// `e^{-iω|v|}`: the full time-ordered kernel.
    Full,
    /// `-i sin(ω|v|)`: the difference between the time-ordered kernel and its
    /// symmetrised (anticommutator) counterpart.
    Commutator,
}

const LAG_WINDOW: f64 = 8.0;

/// Lag factor `½∫ e^{-π(v-Δ)²/(4T²)} g(ω|v|) dv` for `g` selected by `part`.
pub fn lag_factor(omega: f64, timescale: f64, delta: f64, part: LagPart, tol: Tolerance) -> Result<Estimate> {
    let a = std::f64::consts::PI / (4.0 * timescale * timescale);
    let g = move |v: f64| -> Complex64 {
        let w = (-a * (v - delta).powi(2)).exp();
        let ph = omega * v.abs();
        match part {
            LagPart::Full => Complex64::new(w * ph.cos(), -w * ph.sin()),
            LagPart::Commutator => Complex64::new(0.0, -w * ph.sin()),
        }
    };
    let half_width = LAG_WINDOW * timescale;
    let periods = (omega * half_width / std::f64::consts::PI).ceil().max(1.0);
    let pieces = (periods as usize).clamp(2, 4096);
    let tol_inner = Tolerance {
        abs: tol.abs,
        rel: tol.rel,
        max_evaluations: tol.max_evaluations.max(50_000 + 42 * pieces),
    };
    if delta == 0.0 {
        // Even integrand: fold onto v ≥ 0.
        let breaks: Vec<f64> = (0..=pieces).map(|j| half_width * j as f64 / pieces as f64).collect();
        return quadrature::adaptive_with_breaks(g, &breaks, tol_inner);
    }
    let lo = delta - half_width;
    let hi = delta + half_width;
    let mut breaks: Vec<f64> = (0..=2 * pieces)
        .map(|j| lo + (hi - lo) * j as f64 / (2 * pieces) as f64)
        .collect();
    if lo < 0.0 && hi > 0.0 {
        breaks.push(0.0);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
    }
    let est = quadrature::adaptive_with_breaks(g, &breaks, tol_inner)?;
    Ok(Estimate {
        value: est.value * 0.5,
        error: est.error * 0.5,
        evaluations: est.evaluations,
    })
}

/// Closed-form prefactor `2T e^{-Ω²T²/π} e^{iΩ(c_A + c_B)}` multiplying the lag factor.
pub fn gap_prefactor(gap: f64, sa: &SwitchingSpec, sb: &SwitchingSpec) -> Complex64 {
    let t = sa.timescale;
    Complex64::from_polar(
        2.0 * t * (-gap * gap * t * t / std::f64::consts::PI).exp(),
        gap * (sa.center_time + sb.center_time),
    )
}

pub(crate) fn check_same_timescale(sa: &SwitchingSpec, sb: &SwitchingSpec) -> Result<()> {
    if sa.timescale != sb.timescale {
        return Err(Error::SwitchingMismatch(sa.timescale, sb.timescale));
    }
    Ok(())
}

pub(crate) fn lag_tolerance(omega: f64, timescale: f64, settings: &QuadratureSettings) -> Tolerance {
    // The lag factor is O(T) at small ω and falls off like 1/ω.
    let scale = timescale / (1.0 + omega * timescale);
    Tolerance {
        abs: 1e-3 * settings.rel_tol * scale,
        rel: 0.1 * settings.rel_tol,
        max_evaluations: settings.max_evaluations,
    }
}

/// Time-ordered kernel for two switchings of equal width.
pub fn feynman_pair_kernel(
    gap: f64,
    omega: f64,
    sa: &SwitchingSpec,
    sb: &SwitchingSpec,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    check_same_timescale(sa, sb)?;
    let t = sa.timescale;
    let pre = gap_prefactor(gap, sa, sb);
    let lag = lag_factor(
        omega,
        t,
        sa.center_time - sb.center_time,
        LagPart::Full,
        lag_tolerance(omega, t, settings),
    )?;
    Ok(Estimate {
        value: pre * lag.value,
        error: pre.norm() * lag.error,
        evaluations: lag.evaluations,
    })
}

/// `J(Ω, ω; T) = ∫∫ ζ(t)ζ(t') e^{iΩ(t+t')} e^{-iω|t-t'|} dt dt'`.
pub fn feynman_time_kernel(gap: f64, omega: f64, s: &SwitchingSpec, settings: &QuadratureSettings) -> Result<Complex64> {
    Ok(feynman_pair_kernel(gap, omega, s, s, settings)?.value)
}

/// Symmetrised counterpart of [`feynman_pair_kernel`], with `e^{-iω|v|}`
/// replaced by `cos(ωv)`. Closed form.
pub fn symmetric_time_kernel(gap: f64, omega: f64, sa: &SwitchingSpec, sb: &SwitchingSpec) -> Result<Complex64> {
    check_same_timescale(sa, sb)?;
    let t = sa.timescale;
    let delta = sa.center_time - sb.center_time;
    let lag = t * (-omega * omega * t * t / std::f64::consts::PI).exp() * (omega * delta).cos();
    Ok(gap_prefactor(gap, sa, sb) * lag)
}

/// Commutator part of the time-ordered kernel, `J - J_sym`.
pub fn commutator_time_kernel(
    gap: f64,
    omega: f64,
    sa: &SwitchingSpec,
    sb: &SwitchingSpec,
    settings: &QuadratureSettings,
) -> Result<Estimate> {
    check_same_timescale(sa, sb)?;
    let t = sa.timescale;
    let pre = gap_prefactor(gap, sa, sb);
    let lag = lag_factor(
        omega,
        t,
        sa.center_time - sb.center_time,
        LagPart::Commutator,
        lag_tolerance(omega, t, settings),
    )?;
    Ok(Estimate {
        value: pre * lag.value,
        error: pre.norm() * lag.error,
        evaluations: lag.evaluations,
    })
}
