//! Effective spacetime smearings `Λ(t, x) = ζ(t) Φ_N(x)` of a localized probe
//! mode, and their Fourier data.
//!
//! Conventions: `χ̃(ν) = ∫ζ(t) e^{-iνt} dt` and `F̃(k) = ∫Φ(x) e^{-ik·x} d³x`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{self, ModeIndex, PotentialKind, PotentialSpec};

/// Gaussian switching `ζ(t) = exp(-π (t - t0)² / (2T²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchingSpec {
    pub timescale: f64,
    #[serde(default)]
    pub center_time: f64,
}

impl SwitchingSpec {
    pub fn new(timescale: f64) -> Self {
        SwitchingSpec {
            timescale,
            center_time: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.timescale > 0.0 && self.timescale.is_finite()) {
            return Err(Error::param(
                "timescale",
                format!("must be positive and finite, got {}", self.timescale),
            ));
        }
        if !self.center_time.is_finite() {
            return Err(Error::param("center_time", "must be finite"));
        }
        Ok(())
    }
}

/// One localized probe: a trap, the mode it occupies, its switching and its
/// coupling strength.
///
/// The detector gap is the mode frequency unless `gap` overrides it. An
/// override is equivalent to changing the probe mass so that the trapped
/// mode has frequency `gap`; the spatial envelope is unchanged and the mode
/// normalisation `(2Ω)^{-1/2}` uses the overridden value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    pub potential: PotentialSpec,
    pub mode: ModeIndex,
    pub switching: SwitchingSpec,
    pub coupling: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<()> {
        self.potential.validate()?;
        self.mode.validate_for(self.potential.kind)?;
        self.switching.validate()?;
        if !(self.coupling > 0.0 && self.coupling.is_finite()) {
            return Err(Error::param("coupling", format!("must be positive, got {}", self.coupling)));
        }
        if let Some(g) = self.gap {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::param("gap", format!("must be positive, got {g}")));
            }
        }
        Ok(())
    }

    /// Detector energy gap Ω.
    pub fn gap(&self) -> Result<f64> {
        self.validate()?;
        match self.gap {
            Some(g) => Ok(g),
            None => modes::mode_frequency(self.mode, &self.potential),
        }
    }

    /// Copy with the gap pinned to `gap`.
    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = Some(gap);
        self
    }

    /// Copy with the trap translated to `center`.
    pub fn moved_to(mut self, center: [f64; 3]) -> Self {
        self.potential.center = center;
        self
    }

    /// True when the centred spatial transform depends on |k| only.
    pub fn is_radially_symmetric(&self) -> bool {
        self.potential.kind == PotentialKind::Harmonic && self.mode.0 == [0, 0, 0]
    }

    /// Radius of a sphere about the trap centre holding essentially all of
    /// the mode.
    pub fn spatial_radius(&self) -> f64 {
        let r2: f64 = (0..3)
            .map(|i| {
                let (lo, hi) = modes::axis_support(self.potential.kind, self.potential.scale, self.mode.0[i]);
                lo.abs().max(hi.abs()).powi(2)
            })
            .sum();
        r2.sqrt()
    }
}

pub fn switching_value(s: &SwitchingSpec, t: f64) -> f64 {
    let x = (t - s.center_time) / s.timescale;
    (-std::f64::consts::PI * x * x / 2.0).exp()
}

/// `χ̃(ν) = √2 T exp(-ν²T²/(2π)) e^{-iν t0}`.
pub fn switching_fourier(s: &SwitchingSpec, nu: f64) -> Complex64 {
    let t = s.timescale;
    let mag = std::f64::consts::SQRT_2 * t * (-nu * nu * t * t / (2.0 * std::f64::consts::PI)).exp();
    Complex64::from_polar(mag, -nu * s.center_time)
}

/// `|χ̃(ω)|² = 2T² exp(-ω²T²/π)`.
pub fn switching_fourier_sq(s: &SwitchingSpec, omega: f64) -> f64 {
    let t = s.timescale;
    2.0 * t * t * (-omega * omega * t * t / std::f64::consts::PI).exp()
}

/// Transform of one unit-normalised axis factor about its centre.
pub fn axis_fourier(kind: PotentialKind, scale: f64, m: u32, k: f64) -> Complex64 {
    match kind {
        PotentialKind::Harmonic => {
            let psi = modes::hermite_function(m as usize, k * scale).expect("validated order");
            let mag = (2.0 * std::f64::consts::PI * scale).sqrt() * psi;
            // (-i)^m
            match m % 4 {
                0 => Complex64::new(mag, 0.0),
                1 => Complex64::new(0.0, -mag),
                2 => Complex64::new(-mag, 0.0),
                _ => Complex64::new(0.0, mag),
            }
        }
        PotentialKind::Box => box_axis_fourier(scale, m, k),
    }
}

/// Sine-window transform `∫_{-d/2}^{d/2} √(2/d) sin(πn(v + d/2)/d) e^{-ikv} dv`.
///
/// Odd `n` give a real even function, even `n` an imaginary odd one. Near
/// `|k| = πn/d` numerator and denominator both vanish; there the expression
/// is rewritten through `sinc`, which is evaluated by its Taylor series for
/// small arguments.
fn box_axis_fourier(d: f64, n: u32, k: f64) -> Complex64 {
    let alpha = std::f64::consts::PI * n as f64 / d;
    let norm = (2.0 / d).sqrt();
    let odd = n % 2 == 1;
    let ka = k.abs();
    let eps = ka - alpha;
    let value = if eps.abs() <= 1e-4 * alpha {
        let sinc = crate::special::sinc(eps * d / 2.0);
        let sign = if odd {
            if (n / 2) % 2 == 0 { 1.0 } else { -1.0 }
        } else if (n / 2) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        if odd {
            alpha * d * sign * sinc / (2.0 * alpha + eps)
        } else {
            -alpha * d * sign * sinc / (2.0 * alpha + eps)
        }
    } else {
        let denom = alpha * alpha - ka * ka;
        if odd {
            2.0 * alpha * (ka * d / 2.0).cos() / denom
        } else {
            2.0 * alpha * (ka * d / 2.0).sin() / denom
        }
    };
    if odd {
        Complex64::new(norm * value, 0.0)
    } else {
        let signed = if k < 0.0 { -value } else { value };
        Complex64::new(0.0, norm * signed)
    }
}

/// Transform of the unit envelope about the trap centre.
pub fn centered_envelope_fourier(pot: &PotentialSpec, mode: ModeIndex, k: [f64; 3]) -> Complex64 {
    (0..3)
        .map(|i| axis_fourier(pot.kind, pot.scale, mode.0[i], k[i]))
        .product()
}

/// Transform of the unit envelope, including the phase `e^{-ik·c}` of the
/// trap position.
pub fn envelope_fourier(pot: &PotentialSpec, mode: ModeIndex, k: [f64; 3]) -> Result<Complex64> {
    pot.validate()?;
    mode.validate_for(pot.kind)?;
    let phase: f64 = (0..3).map(|i| k[i] * pot.center[i]).sum();
    Ok(centered_envelope_fourier(pot, mode, k) * Complex64::from_polar(1.0, -phase))
}

/// `F̃(k) = ∫Φ_N(x) e^{-ik·x} d³x`, with the `(2Ω)^{-1/2}` mode normalisation.
pub fn spatial_fourier(d: &DetectorSpec, k: [f64; 3]) -> Result<Complex64> {
    let gap = d.gap()?;
    Ok(envelope_fourier(&d.potential, d.mode, k)? / (2.0 * gap).sqrt())
}
