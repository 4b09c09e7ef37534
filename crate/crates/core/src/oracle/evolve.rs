use nalgebra::DMatrix;

use super::gaussian::CovarianceState;
use super::lattice::{normal_modes, probe_modes, LatticeModel};
use crate::error::{Error, Result};
use crate::smearing::{switching_value, SwitchingSpec};

/// Largest admissible `dt · ω_max`.
pub const MAX_PHASE_STEP: f64 = 0.1;
/// `dt · ω_max` used by [`default_step`].
pub const DEFAULT_PHASE_STEP: f64 = 0.01;
/// Switching tails beyond this many timescales are dropped (`ζ < e^{-56}`).
const WINDOW_TIMESCALES: f64 = 6.0;

/// Oscillators of a lattice model in interaction-picture form.
///
/// Modes are ordered probe modes first (probe by probe, each probe's modes
/// ascending), then target normal modes.
#[derive(Debug, Clone)]
pub struct LatticeSystem {
    pub frequencies: Vec<f64>,
    /// Number of probe oscillators; the target modes follow them.
    pub probe_modes: usize,
    /// Index of each probe's detector mode (its lowest oscillator).
    pub detector_modes: Vec<usize>,
    /// `u_m · U_k` for probe mode `m` and target mode `k`.
    pub coupling: DMatrix<f64>,
    /// Probe owning each probe mode.
    owner: Vec<usize>,
    strengths: Vec<f64>,
    switchings: Vec<SwitchingSpec>,
}

impl LatticeSystem {
    pub fn build(model: &LatticeModel) -> Result<Self> {
        let (field_freqs, field_profiles) = normal_modes(model)?;
        let mut frequencies = Vec::new();
        let mut rows = Vec::new();
        let mut owner = Vec::new();
        let mut detector_modes = Vec::new();
        for (p, probe) in model.probes.iter().enumerate() {
            detector_modes.push(frequencies.len());
            for (w, v) in probe_modes(probe, model)? {
                frequencies.push(w);
                rows.push(field_profiles.tr_mul(&v));
                owner.push(p);
            }
        }
        let probe_count = frequencies.len();
        let n_field = field_freqs.len();
        let mut coupling = DMatrix::zeros(probe_count, n_field);
        for (m, row) in rows.iter().enumerate() {
            coupling.row_mut(m).copy_from(&row.transpose());
        }
        frequencies.extend(field_freqs.iter());
        Ok(LatticeSystem {
            frequencies,
            probe_modes: probe_count,
            detector_modes,
            coupling,
            owner,
            strengths: model.probes.iter().map(|p| p.coupling).collect(),
            switchings: model.probes.iter().map(|p| p.switching).collect(),
        })
    }

    pub fn n_modes(&self) -> usize {
        self.frequencies.len()
    }

    pub fn max_frequency(&self) -> f64 {
        self.frequencies.iter().copied().fold(0.0, f64::max)
    }

    /// Time interval outside which every switching is negligible.
    pub fn default_window(&self) -> (f64, f64) {
        let lo = self
            .switchings
            .iter()
            .map(|s| s.center_time - WINDOW_TIMESCALES * s.timescale)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .switchings
            .iter()
            .map(|s| s.center_time + WINDOW_TIMESCALES * s.timescale)
            .fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() {
            (lo, hi)
        } else {
            (0.0, 0.0)
        }
    }

    /// `σ̇ = Fσ + σFᵀ` with `F = Ω G(t)` and `H_I = ½ Rᵀ G(t) R`.
    fn rhs(&self, t: f64, sigma: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n_modes();
        let d = 2 * n;
        let p = self.probe_modes;
        let (cos, sin): (Vec<f64>, Vec<f64>) = self
            .frequencies
            .iter()
            .map(|&w| {
                let (s, c) = (w * t).sin_cos();
                let r = w.sqrt().recip();
                (c * r, s * r)
            })
            .unzip();

        // Row i of `proj` is r_iᵀ σ with q_i(t) = r_iᵀ R.
        let mut proj = DMatrix::<f64>::zeros(n, d);
        for j in 0..d {
            let col = sigma.column(j);
            let mut out = proj.column_mut(j);
            for i in 0..n {
                out[i] = cos[i] * col[2 * i] + sin[i] * col[2 * i + 1];
            }
        }

        let mut ct = self.coupling.clone();
        for m in 0..p {
            let o = self.owner[m];
            let f = self.strengths[o] * switching_value(&self.switchings[o], t);
            ct.row_mut(m).scale_mut(f);
        }
        let to_probe = &ct * proj.rows(p, n - p);
        let to_field = ct.tr_mul(&proj.rows(0, p));

        let mut x = DMatrix::<f64>::zeros(d, d);
        for j in 0..d {
            let mut col = x.column_mut(j);
            for i in 0..n {
                let v = if i < p { to_probe[(i, j)] } else { to_field[(i - p, j)] };
                col[2 * i] = sin[i] * v;
                col[2 * i + 1] = -cos[i] * v;
            }
        }
        let xt = x.transpose();
        x + xt
    }
}

/// `DEFAULT_PHASE_STEP / ω_max`.
pub fn default_step(system: &LatticeSystem) -> f64 {
    DEFAULT_PHASE_STEP / system.max_frequency()
}

/// Integrates the interaction-picture covariance over `t_span` with classical RK4.
///
/// The step is shrunk so that it divides the interval evenly. No symplectic
/// renormalisation is applied.
pub fn evolve_covariance(
    model: &LatticeModel,
    initial: &CovarianceState,
    dt: f64,
    t_span: (f64, f64),
) -> Result<CovarianceState> {
    let system = LatticeSystem::build(model)?;
    evolve_system(&system, initial, dt, t_span)
}

pub fn evolve_system(
    system: &LatticeSystem,
    initial: &CovarianceState,
    dt: f64,
    t_span: (f64, f64),
) -> Result<CovarianceState> {
    let omega_max = system.max_frequency();
    if !(dt > 0.0 && dt.is_finite()) || dt * omega_max >= MAX_PHASE_STEP {
        return Err(Error::StepSize { dt, omega_max });
    }
    if initial.n_modes() != system.n_modes() {
        return Err(Error::InconsistentInput(format!(
            "initial state has {} modes, the model has {}",
            initial.n_modes(),
            system.n_modes()
        )));
    }
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Error::param("t_span", "must be a finite, ordered interval"));
    }
    let steps = ((t1 - t0) / dt).ceil() as usize;
    let mut sigma = initial.matrix.clone();
    if steps == 0 {
        return CovarianceState::new(sigma);
    }
    let h = (t1 - t0) / steps as f64;
    for s in 0..steps {
        let t = t0 + h * s as f64;
        let k1 = system.rhs(t, &sigma);
        let k2 = system.rhs(t + 0.5 * h, &(&sigma + &k1 * (0.5 * h)));
        let k3 = system.rhs(t + 0.5 * h, &(&sigma + &k2 * (0.5 * h)));
        let k4 = system.rhs(t + h, &(&sigma + &k3 * h));
        sigma += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
    }
    // Round-off leaves an asymmetry at the ulp level; average it away.
    let sym = (&sigma + sigma.transpose()) * 0.5;
    CovarianceState::new(sym)
}

/// Joint covariance of the two detector modes after the switchings have died out.
pub fn exact_detector_covariance(model: &LatticeModel, dt: Option<f64>) -> Result<CovarianceState> {
    if model.probes.len() != 2 {
        return Err(Error::InconsistentInput(format!("expected two probes, got {}", model.probes.len())));
    }
    let system = LatticeSystem::build(model)?;
    let dt = dt.unwrap_or_else(|| default_step(&system));
    let state = evolve_system(&system, &CovarianceState::vacuum(system.n_modes()), dt, system.default_window())?;
    state.reduced(&system.detector_modes)
}
