//! Normal modes of a scalar probe field confined by a harmonic trap or by a
//! hard-walled cubic cavity.
//!
//! Both families are separable: a mode is a product of three one-dimensional
//! factors, each unit-normalised on the real line. The physical mode function
//! carries an extra `(2ω)^{-1/2}` so that it is normalised with respect to
//! the Klein–Gordon inner product.
//!
//! `PotentialSpec::center` is the geometric centre of the trap. For the
//! cavity this is the middle of the cube, which occupies
//! `[center_i - d/2, center_i + d/2]` on every axis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Highest Hermite order supported by the recurrences in this module.
pub const HERMITE_MAX_ORDER: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `V(x) = |x - c|^2 / (2 l^4)`.
    Harmonic,
    /// Infinite square well (Dirichlet walls) of side `d`.
    Box,
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Harmonic => "harmonic",
            PotentialKind::Box => "box",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    /// Trap length `l` (harmonic) or cube side `d` (box).
    pub scale: f64,
    /// Probe field mass `m_d`.
    pub probe_mass: f64,
    pub center: [f64; 3],
}

impl PotentialSpec {
    pub fn harmonic(ell: f64, probe_mass: f64, center: [f64; 3]) -> Self {
        PotentialSpec {
            kind: PotentialKind::Harmonic,
            scale: ell,
            probe_mass,
            center,
        }
    }

    pub fn cube(side: f64, probe_mass: f64, center: [f64; 3]) -> Self {
        PotentialSpec {
            kind: PotentialKind::Box,
            scale: side,
            probe_mass,
            center,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::param("scale", format!("must be positive and finite, got {}", self.scale)));
        }
        if !(self.probe_mass >= 0.0 && self.probe_mass.is_finite()) {
            return Err(Error::param(
                "probe_mass",
                format!("must be non-negative and finite, got {}", self.probe_mass),
            ));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("center", "components must be finite"));
        }
        Ok(())
    }

    /// Same trap translated so that its centre sits at `center`.
    pub fn moved_to(mut self, center: [f64; 3]) -> Self {
        self.center = center;
        self
    }
}

/// Mode quantum numbers `(n_x, n_y, n_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeIndex(pub [u32; 3]);

impl ModeIndex {
    /// Lowest mode of the given trap family.
    pub fn ground(kind: PotentialKind) -> Self {
        match kind {
            PotentialKind::Harmonic => ModeIndex([0, 0, 0]),
            PotentialKind::Box => ModeIndex([1, 1, 1]),
        }
    }

    pub fn validate_for(&self, kind: PotentialKind) -> Result<()> {
        match kind {
            PotentialKind::Harmonic => {
                if let Some(&n) = self.0.iter().find(|&&n| n as usize > HERMITE_MAX_ORDER) {
                    return Err(Error::UnsupportedOrder(n as usize));
                }
            }
            PotentialKind::Box => {
                if self.0.contains(&0) {
                    return Err(Error::InvalidIndex {
                        index: self.0,
                        reason: "box mode indices start at 1",
                    });
                }
            }
        }
        Ok(())
    }
}

/// Physicists' Hermite polynomial `H_m(u)` by the three-term recurrence.
pub fn hermite_eval(m: usize, u: f64) -> Result<f64> {
    if m > HERMITE_MAX_ORDER {
        return Err(Error::UnsupportedOrder(m));
    }
    let mut h0 = 1.0;
    if m == 0 {
        return Ok(h0);
    }
    let mut h1 = 2.0 * u;
    for k in 1..m {
        let h2 = 2.0 * u * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// Normalised Hermite function `ψ_m(u) = (2^m m! √π)^{-1/2} H_m(u) e^{-u²/2}`.
///
/// Uses the recurrence on the normalised functions themselves, which stays
/// in range where `H_m` alone would overflow.
pub fn hermite_function(m: usize, u: f64) -> Result<f64> {
    if m > HERMITE_MAX_ORDER {
        return Err(Error::UnsupportedOrder(m));
    }
    let mut p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * u * u).exp();
    if m == 0 {
        return Ok(p0);
    }
    let mut p1 = std::f64::consts::SQRT_2 * u * p0;
    for k in 1..m {
        let kf = k as f64;
        let p2 = (2.0 / (kf + 1.0)).sqrt() * u * p1 - (kf / (kf + 1.0)).sqrt() * p0;
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

pub fn harmonic_frequency(n: ModeIndex, pot: &PotentialSpec) -> Result<f64> {
    if pot.kind != PotentialKind::Harmonic {
        return Err(Error::KindMismatch {
            expected: "harmonic",
            found: pot.kind.name(),
        });
    }
    pot.validate()?;
    n.validate_for(pot.kind)?;
    let quanta: f64 = n.0.iter().map(|&v| v as f64).sum();
    let ell = pot.scale;
    Ok((pot.probe_mass.powi(2) + 2.0 / (ell * ell) * (quanta + 1.5)).sqrt())
}

pub fn box_frequency(n: ModeIndex, pot: &PotentialSpec) -> Result<f64> {
    if pot.kind != PotentialKind::Box {
        return Err(Error::KindMismatch {
            expected: "box",
            found: pot.kind.name(),
        });
    }
    pot.validate()?;
    n.validate_for(pot.kind)?;
    let sq: f64 = n.0.iter().map(|&v| (v as f64).powi(2)).sum();
    let d = pot.scale;
    Ok((pot.probe_mass.powi(2) + std::f64::consts::PI.powi(2) / (d * d) * sq).sqrt())
}

/// Eigenfrequency for either trap family.
pub fn mode_frequency(n: ModeIndex, pot: &PotentialSpec) -> Result<f64> {
    match pot.kind {
        PotentialKind::Harmonic => harmonic_frequency(n, pot),
        PotentialKind::Box => box_frequency(n, pot),
    }
}

/// One-dimensional unit-normalised factor at offset `u` from the trap centre.
/// Assumes a validated index.
pub fn axis_profile(kind: PotentialKind, scale: f64, m: u32, u: f64) -> f64 {
    match kind {
        PotentialKind::Harmonic => {
            hermite_function(m as usize, u / scale).expect("validated order") / scale.sqrt()
        }
        PotentialKind::Box => {
            let s = u + 0.5 * scale;
            if !(0.0..=scale).contains(&s) {
                0.0
            } else {
                (2.0 / scale).sqrt() * (std::f64::consts::PI * m as f64 * s / scale).sin()
            }
        }
    }
}

/// Interval (relative to the centre) outside which the axis factor is zero or
/// negligible against double precision.
pub fn axis_support(kind: PotentialKind, scale: f64, m: u32) -> (f64, f64) {
    match kind {
        PotentialKind::Harmonic => {
            let r = scale * ((2.0 * m as f64 + 1.0).sqrt() + 12.0);
            (-r, r)
        }
        PotentialKind::Box => (-0.5 * scale, 0.5 * scale),
    }
}

/// Unit-normalised spatial envelope `Φ̄_n(x)` (no `(2ω)^{-1/2}` factor).
pub fn envelope(n: ModeIndex, pot: &PotentialSpec, x: [f64; 3]) -> Result<f64> {
    pot.validate()?;
    n.validate_for(pot.kind)?;
    Ok((0..3)
        .map(|i| axis_profile(pot.kind, pot.scale, n.0[i], x[i] - pot.center[i]))
        .product())
}

/// Mode function `Φ_n(x) = (2ω_n)^{-1/2} Φ̄_n(x)`.
pub fn mode_spatial_profile(n: ModeIndex, pot: &PotentialSpec, x: [f64; 3]) -> Result<f64> {
    let omega = mode_frequency(n, pot)?;
    Ok(envelope(n, pot, x)? / (2.0 * omega).sqrt())
}

/// Overlap `∫ Φ̄_A Φ̄_B d³x` of two unit-normalised envelopes.
pub fn mode_overlap(na: ModeIndex, pot_a: &PotentialSpec, nb: ModeIndex, pot_b: &PotentialSpec) -> Result<f64> {
    pot_a.validate()?;
    pot_b.validate()?;
    na.validate_for(pot_a.kind)?;
    nb.validate_for(pot_b.kind)?;

    let both_ground_gaussians = pot_a.kind == PotentialKind::Harmonic
        && pot_b.kind == PotentialKind::Harmonic
        && na.0 == [0, 0, 0]
        && nb.0 == [0, 0, 0];
    if both_ground_gaussians {
        let (la, lb) = (pot_a.scale, pot_b.scale);
        let s2 = la * la + lb * lb;
        let dist2: f64 = (0..3).map(|i| (pot_a.center[i] - pot_b.center[i]).powi(2)).sum();
        return Ok((2.0 * la * lb / s2).powf(1.5) * (-dist2 / (2.0 * s2)).exp());
    }

    let tol = Tolerance {
        abs: 1e-12,
        rel: 1e-12,
        max_evaluations: 400_000,
    };
    let mut value: f64 = 1.0;
    let mut error: f64 = 0.0;
    for i in 0..3 {
        let (a0, a1) = axis_support(pot_a.kind, pot_a.scale, na.0[i]);
        let (b0, b1) = axis_support(pot_b.kind, pot_b.scale, nb.0[i]);
        let lo = (pot_a.center[i] + a0).max(pot_b.center[i] + b0);
        let hi = (pot_a.center[i] + a1).min(pot_b.center[i] + b1);
        if lo >= hi {
            return Ok(0.0);
        }
        let oscillations = (na.0[i] + nb.0[i]) as usize + 1;
        let breaks: Vec<f64> = (0..=4 * oscillations)
            .map(|j| lo + (hi - lo) * j as f64 / (4 * oscillations) as f64)
            .collect();
        let est = quadrature::adaptive_with_breaks(
            |x| {
                let fa = axis_profile(pot_a.kind, pot_a.scale, na.0[i], x - pot_a.center[i]);
                let fb = axis_profile(pot_b.kind, pot_b.scale, nb.0[i], x - pot_b.center[i]);
                num_complex::Complex64::new(fa * fb, 0.0)
            },
            &breaks,
            tol,
        )?;
        let axis = est.value.re;
        error = error * axis.abs() + est.error * value.abs();
        value *= axis;
    }
    if error > 1e-10 {
        return Err(Error::ToleranceNotMet { value, error });
    }
    Ok(value)
}
