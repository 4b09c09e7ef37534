//! Direction averages `A_IJ(k) = (1/4π) ∫ dΩ conj(F̄_I(k n)) F̄_J(k n)` of the
//! product of two unit-envelope transforms, trap positions included.
//!
//! Three strategies, chosen from the geometry:
//!
//! * isotropic: both modes are Gaussian ground states, and the average is
//!   `G_I(k) G_J(k) sinc(k |s|)` in closed form;
//! * separable: the separation lies along a coordinate axis (or vanishes).
//!   Taking that axis as the pole, the transverse factor only depends on
//!   `q = k sin θ`, so it is tabulated once as a function of `q` and the
//!   remaining integral is one-dimensional;
//! * tensor: general direction, a product rule over `(θ, φ)`.
//!
//! A seeded Monte Carlo average over directions is available for testing the
//! deterministic rules.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::modes::{ModeIndex, PotentialKind};
use crate::quadrature::GaussLegendre;
use crate::smearing::{axis_fourier, DetectorSpec};
use crate::special::sinc;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
/// Phase advance allowed per 16-point Gauss–Legendre panel.
const PHASE_PER_PANEL: f64 = 6.0;
const CHEB_NODES: usize = 24;

/// Centred transform data of one detector.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Side {
    kind: PotentialKind,
    scale: f64,
    mode: ModeIndex,
}

impl Side {
    pub(crate) fn of(d: &DetectorSpec) -> Self {
        Side {
            kind: d.potential.kind,
            scale: d.potential.scale,
            mode: d.mode,
        }
    }

    fn axis(&self, axis: usize, k: f64) -> Complex64 {
        axis_fourier(self.kind, self.scale, self.mode.0[axis], k)
    }

    fn full(&self, k: [f64; 3]) -> Complex64 {
        self.axis(0, k[0]) * self.axis(1, k[1]) * self.axis(2, k[2])
    }

    /// Length scale setting the oscillation rate of the axis transform in k.
    fn extent(&self, axis: usize) -> f64 {
        match self.kind {
            PotentialKind::Box => 0.5 * self.scale,
            PotentialKind::Harmonic => self.scale * (2.0 * self.mode.0[axis] as f64 + 1.0).sqrt(),
        }
    }

    fn total_extent(&self) -> f64 {
        (0..3).map(|a| self.extent(a)).sum()
    }

    pub(crate) fn is_harmonic(&self) -> bool {
        self.kind == PotentialKind::Harmonic
    }

    fn is_gaussian_ground(&self) -> bool {
        self.kind == PotentialKind::Harmonic && self.mode.0 == [0, 0, 0]
    }

    /// Cut-off beyond which the transform is negligible (Gaussian) or beyond
    /// which its power-law tail is handled by the truncation estimate (box).
    pub(crate) fn k_max(&self, rel_tol: f64) -> f64 {
        let n_max = *self.mode.0.iter().max().expect("three axes") as f64;
        match self.kind {
            PotentialKind::Harmonic => ((2.0 * n_max + 1.0).sqrt() + 7.5) / self.scale,
            PotentialKind::Box => {
                let kappa = (50.0 / rel_tol).powf(0.2).max(10.0);
                kappa * std::f64::consts::PI * n_max / self.scale
            }
        }
    }
}

/// Piecewise Chebyshev interpolant of a smooth complex function on `[0, hi]`.
#[derive(Debug, Clone)]
struct ChebTable {
    width: f64,
    panels: Vec<[Complex64; CHEB_NODES]>,
}

impl ChebTable {
    fn build<F: Fn(f64) -> Complex64 + Sync>(hi: f64, width: f64, f: F) -> (Self, f64) {
        let n_panels = ((hi / width).ceil() as usize).max(1);
        let width = hi / n_panels as f64;
        let n = CHEB_NODES;
        let nodes: Vec<f64> = (0..n)
            .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos())
            .collect();
        let build_panel = |p: usize| -> ([Complex64; CHEB_NODES], f64) {
            let lo = p as f64 * width;
            let values: Vec<Complex64> = nodes.iter().map(|t| f(lo + 0.5 * width * (t + 1.0))).collect();
            let mut coeffs = [Complex64::new(0.0, 0.0); CHEB_NODES];
            for (m, c) in coeffs.iter_mut().enumerate() {
                let s: Complex64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (std::f64::consts::PI * m as f64 * (j as f64 + 0.5) / n as f64).cos())
                    .sum();
                *c = s * (2.0 / n as f64);
            }
            coeffs[0] *= 0.5;
            // Check the interpolant away from the nodes.
            let mut err: f64 = 0.0;
            for t in [-0.93, 0.41] {
                let x = lo + 0.5 * width * (t + 1.0);
                err = err.max((clenshaw(&coeffs, t) - f(x)).norm());
            }
            (coeffs, err)
        };
        let built: Vec<([Complex64; CHEB_NODES], f64)> = map_indices(n_panels, build_panel);
        let err = built.iter().map(|b| b.1).fold(0.0, f64::max);
        (
            ChebTable {
                width,
                panels: built.into_iter().map(|b| b.0).collect(),
            },
            err,
        )
    }

    fn eval(&self, x: f64) -> Complex64 {
        let p = ((x / self.width) as usize).min(self.panels.len() - 1);
        let t = 2.0 * (x - p as f64 * self.width) / self.width - 1.0;
        clenshaw(&self.panels[p], t)
    }
}

fn clenshaw(c: &[Complex64; CHEB_NODES], t: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * t) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * t - b2
}

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Direction average at one radius, with an estimate of its absolute error.
#[derive(Debug, Clone, Copy)]
pub(crate) struct AngularValue {
    pub value: Complex64,
    /// `(1/4π) ∫ |integrand| dΩ`, used to scale error estimates.
    pub abs_mean: f64,
    pub error: f64,
}

#[derive(Debug, Clone)]
enum Strategy {
    Isotropic {
        sep: f64,
    },
    Separable {
        axis: usize,
        sep: f64,
        transverse: ChebTable,
        table_error: f64,
    },
    Tensor {
        frame: [[f64; 3]; 3],
        sep: f64,
    },
    MonteCarlo {
        frame: [[f64; 3]; 3],
        sep: f64,
        seed: u64,
        samples: usize,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct AngularPlan {
    i: Side,
    j: Side,
    strategy: Strategy,
    rule: GaussLegendre,
}

pub(crate) enum Requested {
    Deterministic { force_directional: bool },
    MonteCarlo { seed: u64, samples: usize },
}

impl AngularPlan {
    /// `sep` is the position of trap I minus that of trap J; `k_max` bounds
    /// the radii at which the plan will be evaluated.
    pub(crate) fn new(i: Side, j: Side, sep: [f64; 3], k_max: f64, how: Requested) -> Self {
        let rule = GaussLegendre::new(16);
        let norm = sep.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = norm.max(i.scale).max(j.scale);
        let nonzero: Vec<usize> = (0..3).filter(|&a| sep[a].abs() > 1e-12 * scale).collect();
        let frame = polar_frame(sep, norm);
        let strategy = match how {
            Requested::MonteCarlo { seed, samples } => Strategy::MonteCarlo {
                frame,
                sep: norm,
                seed,
                samples,
            },
            Requested::Deterministic { force_directional } => {
                if !force_directional && i.is_gaussian_ground() && j.is_gaussian_ground() {
                    Strategy::Isotropic { sep: norm }
                } else if nonzero.len() <= 1 {
                    let axis = nonzero.first().copied().unwrap_or(0);
                    let (b, c) = others(axis);
                    let perp = i.extent(b) + j.extent(b) + i.extent(c) + j.extent(c);
                    let width = 12.0 / perp;
                    let rule_ref = &rule;
                    let (transverse, table_error) = ChebTable::build(k_max.max(1e-9), width, |q| {
                        transverse_integral(&i, &j, b, c, q, perp, rule_ref)
                    });
                    Strategy::Separable {
                        axis,
                        sep: sep[axis],
                        transverse,
                        table_error,
                    }
                } else {
                    Strategy::Tensor { frame, sep: norm }
                }
            }
        };
        AngularPlan { i, j, strategy, rule }
    }

    #[cfg(test)]
    pub(crate) fn is_isotropic(&self) -> bool {
        matches!(self.strategy, Strategy::Isotropic { .. })
    }

    /// Average at radius `k`. `check` requests an explicit error estimate by
    /// repeating the rule with doubled resolution.
    pub(crate) fn average(&self, k: f64, node_index: usize, check: bool) -> AngularValue {
        match &self.strategy {
            Strategy::Isotropic { sep } => {
                let gi = self.i.full([k, 0.0, 0.0]).re;
                let gj = self.j.full([k, 0.0, 0.0]).re;
                let v = gi * gj * sinc(k * sep);
                AngularValue {
                    value: Complex64::new(v, 0.0),
                    abs_mean: v.abs(),
                    error: 0.0,
                }
            }
            Strategy::Separable {
                axis,
                sep,
                transverse,
                table_error,
            } => {
                let span = 2.0 * k * (sep.abs() + self.i.total_extent() + self.j.total_extent());
                let panels = (span / PHASE_PER_PANEL).ceil() as usize + 1;
                let (v, a, x_abs) = self.separable_theta(k, *axis, *sep, transverse, panels);
                let mut error = x_abs * table_error;
                if check {
                    let (v2, _, _) = self.separable_theta(k, *axis, *sep, transverse, 2 * panels);
                    error += (v2 - v).norm();
                }
                AngularValue {
                    value: v,
                    abs_mean: a,
                    error,
                }
            }
            Strategy::Tensor { frame, sep } => {
                let (v, a) = self.tensor(k, frame, *sep, 1);
                let error = if check {
                    let (v2, _) = self.tensor(k, frame, *sep, 2);
                    (v2 - v).norm()
                } else {
                    0.0
                };
                AngularValue {
                    value: v,
                    abs_mean: a,
                    error,
                }
            }
            Strategy::MonteCarlo {
                frame,
                sep,
                seed,
                samples,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (node_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let mut sum = Complex64::new(0.0, 0.0);
                let mut sum_sq = 0.0;
                let mut sum_abs = 0.0;
                for _ in 0..*samples {
                    let mu: f64 = rng.gen_range(-1.0..1.0);
                    let phi: f64 = rng.gen_range(0.0..TWO_PI);
                    let f = self.direction_integrand(k, frame, *sep, mu, phi);
                    sum += f;
                    sum_sq += f.norm_sqr();
                    sum_abs += f.norm();
                }
                let n = *samples as f64;
                let mean = sum / n;
                let var = (sum_sq / n - mean.norm_sqr()).max(0.0);
                AngularValue {
                    value: mean,
                    abs_mean: sum_abs / n,
                    error: (var / (n - 1.0)).sqrt(),
                }
            }
        }
    }

    /// Returns the θ-integral, its absolute-value counterpart, and the
    /// average of |X| (which scales the transverse table error).
    fn separable_theta(
        &self,
        k: f64,
        axis: usize,
        sep: f64,
        transverse: &ChebTable,
        panels: usize,
    ) -> (Complex64, f64, f64) {
        let (ts, ws) = self.rule.composite(0.0, std::f64::consts::PI, panels);
        let mut v = Complex64::new(0.0, 0.0);
        let mut a = 0.0;
        let mut xa = 0.0;
        for (&t, &w) in ts.iter().zip(&ws) {
            let (st, ct) = t.sin_cos();
            let kz = k * ct;
            let x = self.i.axis(axis, kz).conj() * self.j.axis(axis, kz);
            let b = transverse.eval(k * st);
            let f = x * b * Complex64::from_polar(1.0, kz * sep);
            v += f * (w * st);
            a += f.norm() * w * st;
            xa += x.norm() * w * st;
        }
        (v / FOUR_PI, a / FOUR_PI, xa / FOUR_PI)
    }

    fn direction_integrand(&self, k: f64, frame: &[[f64; 3]; 3], sep: f64, mu: f64, phi: f64) -> Complex64 {
        let st = (1.0 - mu * mu).max(0.0).sqrt();
        let (sp, cp) = phi.sin_cos();
        let mut kv = [0.0; 3];
        for (a, kv_a) in kv.iter_mut().enumerate() {
            *kv_a = k * (mu * frame[2][a] + st * (cp * frame[0][a] + sp * frame[1][a]));
        }
        self.i.full(kv).conj() * self.j.full(kv) * Complex64::from_polar(1.0, k * sep * mu)
    }

    fn tensor(&self, k: f64, frame: &[[f64; 3]; 3], sep: f64, refine: usize) -> (Complex64, f64) {
        let ext = self.i.total_extent() + self.j.total_extent();
        let theta_panels = refine * ((2.0 * k * (sep + ext) / PHASE_PER_PANEL).ceil() as usize + 1);
        let (ts, ws) = self.rule.composite(0.0, std::f64::consts::PI, theta_panels);
        let mut v = Complex64::new(0.0, 0.0);
        let mut a = 0.0;
        for (&t, &w) in ts.iter().zip(&ws) {
            let (st, ct) = t.sin_cos();
            let phi_panels = refine * ((4.0 * k * st * ext / PHASE_PER_PANEL).ceil() as usize + 2);
            let (ps, pw) = self.rule.composite(0.0, TWO_PI, phi_panels);
            for (&p, &u) in ps.iter().zip(&pw) {
                let f = self.direction_integrand(k, frame, sep, ct, p);
                v += f * (w * u * st);
                a += f.norm() * w * u * st;
            }
        }
        (v / FOUR_PI, a / FOUR_PI)
    }
}

fn others(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    }
}

/// `∫_0^{2π} conj(c_Ib c_Ic) c_Jb c_Jc (q cos φ, q sin φ) dφ`.
fn transverse_integral(i: &Side, j: &Side, b: usize, c: usize, q: f64, perp: f64, rule: &GaussLegendre) -> Complex64 {
    let panels = (4.0 * q * perp / PHASE_PER_PANEL).ceil() as usize + 2;
    let (ps, ws) = rule.composite(0.0, TWO_PI, panels);
    ps.iter()
        .zip(&ws)
        .map(|(&p, &w)| {
            let (sp, cp) = p.sin_cos();
            let (kb, kc) = (q * cp, q * sp);
            (i.axis(b, kb) * i.axis(c, kc)).conj() * j.axis(b, kb) * j.axis(c, kc) * w
        })
        .sum()
}

/// Orthonormal frame whose third vector points along `sep`.
fn polar_frame(sep: [f64; 3], norm: f64) -> [[f64; 3]; 3] {
    if norm == 0.0 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let e3 = [sep[0] / norm, sep[1] / norm, sep[2] / norm];
    let helper = if e3[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = helper[0] * e3[0] + helper[1] * e3[1] + helper[2] * e3[2];
    let mut e1 = [helper[0] - dot * e3[0], helper[1] - dot * e3[1], helper[2] - dot * e3[2]];
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|x| *x /= n1);
    let e2 = [
        e3[1] * e1[2] - e3[2] * e1[1],
        e3[2] * e1[0] - e3[0] * e1[2],
        e3[0] * e1[1] - e3[1] * e1[0],
    ];
    [e1, e2, e3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::PotentialSpec;
    use crate::smearing::SwitchingSpec;

    fn det(pot: PotentialSpec, mode: [u32; 3]) -> DetectorSpec {
        DetectorSpec {
            potential: pot,
            mode: ModeIndex(mode),
            switching: SwitchingSpec::new(1.0),
            coupling: 1.0,
            gap: None,
        }
    }

    #[test]
    fn strategies_agree_for_gaussians() {
        let a = Side::of(&det(PotentialSpec::harmonic(0.3, 0.0, [0.0; 3]), [0, 0, 0]));
        let sep = [1.2, 0.0, 0.0];
        let iso = AngularPlan::new(a, a, sep, 40.0, Requested::Deterministic { force_directional: false });
        let sepd = AngularPlan::new(a, a, sep, 40.0, Requested::Deterministic { force_directional: true });
        let ten = AngularPlan::new(a, a, [0.6, 0.6, 0.84852813742385702], 40.0, Requested::Deterministic {
            force_directional: true,
        });
        assert!(iso.is_isotropic());
        for k in [0.1, 2.0, 7.5, 19.0] {
            let x = iso.average(k, 0, false).value;
            let y = sepd.average(k, 0, true);
            let z = ten.average(k, 0, true);
            assert!((x - y.value).norm() < 1e-12, "k={k}: {x} vs {}", y.value);
            assert!((x - z.value).norm() < 1e-12, "k={k}: {x} vs {}", z.value);
            assert!(y.error < 1e-12 && z.error < 1e-12);
        }
    }

    #[test]
    fn separable_matches_tensor_for_boxes() {
        let a = Side::of(&det(PotentialSpec::cube(0.5, 0.0, [0.0; 3]), [1, 1, 1]));
        let b = Side::of(&det(PotentialSpec::cube(0.5, 0.0, [0.0; 3]), [2, 1, 3]));
        for sep in [[0.0, 0.0, 0.0], [0.0, -1.5, 0.0]] {
            let s = AngularPlan::new(a, b, sep, 60.0, Requested::Deterministic { force_directional: true });
            assert!(matches!(s.strategy, Strategy::Separable { .. }));
            let mut t = s.clone();
            t.strategy = Strategy::Tensor {
                frame: polar_frame(sep, sep.iter().map(|x| x * x).sum::<f64>().sqrt()),
                sep: sep.iter().map(|x| x * x).sum::<f64>().sqrt(),
            };
            for k in [0.5, 6.0, 13.0, 40.0] {
                let x = s.average(k, 0, true);
                let y = t.average(k, 0, true);
                assert!(
                    (x.value - y.value).norm() < 1e-11 * x.abs_mean.max(1e-3),
                    "sep={sep:?} k={k}: {} vs {}",
                    x.value,
                    y.value
                );
            }
        }
    }

    #[test]
    fn monte_carlo_is_seeded_and_consistent() {
        let a = Side::of(&det(PotentialSpec::cube(0.5, 0.0, [0.0; 3]), [1, 1, 1]));
        let mc = AngularPlan::new(a, a, [0.0; 3], 20.0, Requested::MonteCarlo { seed: 7, samples: 4000 });
        let det_plan = AngularPlan::new(a, a, [0.0; 3], 20.0, Requested::Deterministic { force_directional: true });
        let x = mc.average(5.0, 3, false);
        let y = mc.average(5.0, 3, false);
        assert_eq!(x.value, y.value);
        let exact = det_plan.average(5.0, 0, false).value;
        assert!((x.value - exact).norm() < 5.0 * x.error + 1e-15);
    }
}
