//! Browser bindings for three small views of the library: the purity curve
//! of a trapped Gaussian mode, the leading-order negativity of two harmonic
//! traps as a function of the gap, and one-dimensional mode profiles.
//!
//! Every export returns a flat `Float64Array` of `(x, y)` pairs. The plain
//! Rust functions behind them are public so they can be tested natively.

use harvest_core::harvesting::PairIntegrator;
use harvest_core::kernels::{QuadratureSettings, TargetFieldSpec};
use harvest_core::modes::{axis_profile, axis_support, ModeIndex, PotentialKind, PotentialSpec};
use harvest_core::purity::{symplectic_eigenvalue, PuritySpec};
use harvest_core::smearing::{DetectorSpec, SwitchingSpec};
use wasm_bindgen::prelude::*;

fn check_points(points: usize) -> Result<(), String> {
    if !(2..=5000).contains(&points) {
        return Err(format!("points must be between 2 and 5000, got {points}"));
    }
    Ok(())
}

/// `ν` against `σ/ℓ`, log-spaced over `[min_ratio, max_ratio]`.
pub fn purity_points(mass_ell: f64, dim: u32, min_ratio: f64, max_ratio: f64, points: usize) -> Result<Vec<f64>, String> {
    check_points(points)?;
    if !(min_ratio > 0.0 && min_ratio < max_ratio) {
        return Err("need 0 < min_ratio < max_ratio".into());
    }
    let (a, b) = (min_ratio.ln(), max_ratio.ln());
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let ratio = (a + (b - a) * i as f64 / (points - 1) as f64).exp();
        let spec = PuritySpec {
            sigma: ratio,
            ell: 1.0,
            mass_ell,
            dim,
            series_rel_tol: 1e-10,
        };
        let nu = symplectic_eigenvalue(&spec).map_err(|e| e.to_string())?.nu;
        out.extend([ratio, nu]);
    }
    Ok(out)
}

/// Negativity per `λ²` of two ground-state harmonic traps of length `ell`,
/// `separation` apart in a massless field, over a linear gap sweep.
/// Points where the quadrature fails are reported as NaN.
pub fn negativity_points(ell: f64, separation: f64, gap_min: f64, gap_max: f64, points: usize) -> Result<Vec<f64>, String> {
    check_points(points)?;
    if !(gap_min >= 0.0 && gap_min < gap_max) {
        return Err("need 0 <= gap_min < gap_max".into());
    }
    let a = DetectorSpec {
        potential: PotentialSpec::harmonic(ell, 0.0, [0.0; 3]),
        mode: ModeIndex([0, 0, 0]),
        switching: SwitchingSpec::new(1.0),
        coupling: 1.0,
        gap: Some(1.0),
    };
    let b = a.moved_to([separation, 0.0, 0.0]);
    let settings = QuadratureSettings {
        rel_tol: 1e-5,
        ..QuadratureSettings::default()
    };
    let mut integ = PairIntegrator::new(&a, &b, &TargetFieldSpec::massless(), &settings).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        // Cell midpoints keep the sweep away from a zero gap.
        let gap = gap_min + (gap_max - gap_min) * (i as f64 + 0.5) / points as f64;
        let n = integ.evaluate(Some(gap)).map_or(f64::NAN, |r| r.negativity);
        out.extend([gap, n]);
    }
    Ok(out)
}

/// One-dimensional factor `f_m(u)` of a harmonic (`"harmonic"`) or box
/// (`"box"`) trap of the given scale, sampled across its support.
pub fn profile_points(kind: &str, scale: f64, m: u32, points: usize) -> Result<Vec<f64>, String> {
    check_points(points)?;
    let kind = match kind {
        "harmonic" => PotentialKind::Harmonic,
        "box" => PotentialKind::Box,
        other => return Err(format!("unknown trap kind `{other}`")),
    };
    if !(scale > 0.0 && scale.is_finite()) {
        return Err("scale must be positive".into());
    }
    if kind == PotentialKind::Box && m == 0 {
        return Err("box modes start at 1".into());
    }
    if m > 40 {
        return Err("mode index must be at most 40".into());
    }
    let (lo, hi) = match kind {
        // The numerical support is very wide; show the classically allowed
        // region with a margin instead.
        PotentialKind::Harmonic => {
            let r = scale * ((2.0 * m as f64 + 1.0).sqrt() + 3.0);
            (-r, r)
        }
        PotentialKind::Box => {
            let (a, b) = axis_support(kind, scale, m);
            (a - 0.25 * scale, b + 0.25 * scale)
        }
    };
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let u = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        out.extend([u, axis_profile(kind, scale, m, u)]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn purity_curve(mass_ell: f64, dim: u32, min_ratio: f64, max_ratio: f64, points: usize) -> Result<Vec<f64>, JsError> {
    purity_points(mass_ell, dim, min_ratio, max_ratio, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn negativity_curve(ell: f64, separation: f64, gap_min: f64, gap_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    negativity_points(ell, separation, gap_min, gap_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn mode_profile(kind: &str, scale: f64, m: u32, points: usize) -> Result<Vec<f64>, JsError> {
    profile_points(kind, scale, m, points).map_err(|e| JsError::new(&e))
}
