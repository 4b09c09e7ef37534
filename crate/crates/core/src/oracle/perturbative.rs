use num_complex::Complex64;

use super::lattice::{normal_modes, probe_modes, LatticeModel};
use crate::error::{Error, Result};
use crate::harvesting::{ErrorBounds, HarvestingResult};
use crate::kernels::{feynman_pair_kernel, QuadratureSettings};
use crate::smearing::switching_fourier_sq;

fn kernel_settings() -> QuadratureSettings {
    QuadratureSettings {
        rel_tol: 1e-11,
        abs_tol: 1e-300,
        ..QuadratureSettings::default()
    }
}

/// Leading-order detector state with the momentum integral replaced by a sum
/// over lattice normal modes.
///
/// Each probe is represented by its lowest oscillator. With `g^I_k` the
/// overlap of probe `I` with target mode `k`,
///
/// ```text
/// L_IJ = λ_I λ_J Σ_k g^I_k g^J_k / (2ω_k 2Ω) |χ̃(Ω + ω_k)|² e^{i(Ω + ω_k)(c_I - c_J)}
/// K_I  = λ_I²    Σ_k (g^I_k)²   / (2ω_k 2Ω) J_II(Ω, ω_k)
/// M    = -λ_A λ_B Σ_k g^A_k g^B_k / (2ω_k 2Ω) J_AB(Ω, ω_k)
/// ```
///
/// where `J` is the time-ordered kernel of [`crate::kernels`].
pub fn perturbative_prediction(model: &LatticeModel) -> Result<HarvestingResult> {
    if model.probes.len() != 2 {
        return Err(Error::InconsistentInput(format!("expected two probes, got {}", model.probes.len())));
    }
    let (freqs, profiles) = normal_modes(model)?;
    let (pa, pb) = (&model.probes[0], &model.probes[1]);
    let (gap_a, va) = probe_modes(pa, model)?.swap_remove(0);
    let (gap_b, vb) = probe_modes(pb, model)?.swap_remove(0);
    let ga = profiles.tr_mul(&va);
    let gb = profiles.tr_mul(&vb);
    let (la, lb) = (pa.coupling, pb.coupling);
    let (sa, sb) = (&pa.switching, &pb.switching);
    let settings = kernel_settings();

    let mut l_aa = 0.0;
    let mut l_bb = 0.0;
    let mut k_a = Complex64::new(0.0, 0.0);
    let mut k_b = Complex64::new(0.0, 0.0);
    let mut err = ErrorBounds::default();
    for (k, &w) in freqs.iter().enumerate() {
        let wa = ga[k] * ga[k] / (2.0 * w * 2.0 * gap_a);
        let wb = gb[k] * gb[k] / (2.0 * w * 2.0 * gap_b);
        l_aa += la * la * wa * switching_fourier_sq(sa, gap_a + w);
        l_bb += lb * lb * wb * switching_fourier_sq(sb, gap_b + w);
        let ja = feynman_pair_kernel(gap_a, w, sa, sa, &settings)?;
        let jb = feynman_pair_kernel(gap_b, w, sb, sb, &settings)?;
        k_a += ja.value * (la * la * wa);
        k_b += jb.value * (lb * lb * wb);
        err.k_a += ja.error * la * la * wa;
        err.k_b += jb.error * lb * lb * wb;
    }

    if gap_a != gap_b {
        return Err(Error::GapMismatch(gap_a, gap_b));
    }
    let gap = gap_a;
    let delta = sa.center_time - sb.center_time;
    let mut l_ab = Complex64::new(0.0, 0.0);
    let mut m = Complex64::new(0.0, 0.0);
    for (k, &w) in freqs.iter().enumerate() {
        let weight = la * lb * ga[k] * gb[k] / (2.0 * w * 2.0 * gap);
        let nu = gap + w;
        l_ab += Complex64::from_polar(weight * switching_fourier_sq(sa, nu), nu * delta);
        let j = feynman_pair_kernel(gap, w, sa, sb, &settings)?;
        m -= j.value * weight;
        err.m += j.error * weight.abs();
    }

    let mut out = HarvestingResult::from_scalars(l_aa, l_bb, l_ab, k_a, k_b, m)?;
    out.errors = err;
    Ok(out)
}
