//! Brute-force references for the harvesting scalars.
//!
//! Nothing here calls the library's transforms, kernels or quadrature. Time
//! integrals are done on the original (t, t') domain, spatial transforms from
//! their own closed forms, and direction averages on explicit tensor grids.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

use harvest_core::kernels::TargetFieldSpec;
use harvest_core::modes::{ModeIndex, PotentialSpec};
use harvest_core::smearing::{DetectorSpec, SwitchingSpec};

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        loop {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                let (mut q0, mut q1) = (1.0, z);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let d = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * d * d);
                break;
            }
        }
    }
    (x, w)
}

/// Composite rule with `panels` equal panels of an `n`-point rule.
fn composite<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            s += f(lo + 0.5 * h * (x + 1.0)) * (0.5 * h * w);
        }
    }
    s
}

/// Panel doubling until two successive values agree to `rel`.
fn converged<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, start_panels: usize, rel: f64) -> Complex64 {
    let rule = gauss_legendre(8);
    let mut panels = start_panels;
    let mut prev = composite(&mut f, a, b, panels, &rule);
    for _ in 0..8 {
        panels *= 2;
        let next = composite(&mut f, a, b, panels, &rule);
        if (next - prev).norm() <= rel * next.norm().max(1e-300) {
            return next;
        }
        prev = next;
    }
    panic!("brute-force integral did not settle");
}

const T_WINDOW: f64 = 8.0;

/// Panels across the switching window, at most two radians of phase each.
fn time_panels(frequency: f64) -> usize {
    (2.0 * T_WINDOW * (frequency.abs() / 2.0).max(8.0)).ceil() as usize
}

fn switching(t: f64) -> f64 {
    (-PI * t * t / 2.0).exp()
}

/// `|χ̃(ν)|²` for the unit-width switching, from a direct time integral.
pub fn switching_transform_sq(nu: f64) -> f64 {
    let rule = gauss_legendre(6);
    let panels = time_panels(nu);
    let v = composite(
        &mut |t| Complex64::from_polar(switching(t), -nu * t),
        -T_WINDOW,
        T_WINDOW,
        panels,
        &rule,
    );
    v.norm_sqr()
}

/// `∫∫ ζ(t)ζ(t') e^{iΩ(t+t')} e^{-iω|t-t'|} dt dt'` on the (t, t') square.
///
/// Split along the diagonal, each half is an outer integral over `t` of a
/// running inner integral over `t'`. The running integrals are accumulated
/// panel by panel, with the partial panel up to each outer node done by its
/// own Gauss rule, so the nested quadrature is of high order throughout.
pub fn time_ordered_kernel(gap: f64, omega: f64) -> Complex64 {
    let (x, w) = gauss_legendre(8);
    let a = |t: f64| Complex64::from_polar(switching(t), (gap + omega) * t);
    let b = |t: f64| Complex64::from_polar(switching(t), (gap - omega) * t);
    let partial = |f: &dyn Fn(f64) -> Complex64, lo: f64, hi: f64| -> Complex64 {
        let h = hi - lo;
        x.iter()
            .zip(&w)
            .map(|(xi, wi)| f(lo + 0.5 * h * (xi + 1.0)) * (0.5 * h * wi))
            .sum()
    };
    let panels = time_panels(gap.abs() + omega);
    let step = 2.0 * T_WINDOW / panels as f64;
    let b_total: Complex64 = (0..panels)
        .map(|p| {
            let lo = -T_WINDOW + step * p as f64;
            partial(&b, lo, lo + step)
        })
        .sum();
    let mut cum_a = Complex64::new(0.0, 0.0);
    let mut cum_b = Complex64::new(0.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = -T_WINDOW + step * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            let t = lo + 0.5 * step * (xi + 1.0);
            let below_a = cum_a + partial(&a, lo, t);
            let below_b = cum_b + partial(&b, lo, t);
            total += (b(t) * below_a + a(t) * (b_total - below_b)) * (0.5 * step * wi);
        }
        cum_a += partial(&a, lo, lo + step);
        cum_b += partial(&b, lo, lo + step);
    }
    total
}

/// `f(ω)` sampled on a uniform grid and read back by six-point Lagrange
/// interpolation, so expensive time integrals are done once per node.
pub struct Table {
    step: f64,
    values: Vec<Complex64>,
}

impl Table {
    pub fn new(f: impl Fn(f64) -> Complex64, omega_max: f64, step: f64) -> Self {
        let n = (omega_max / step).ceil() as usize + 6;
        Table {
            step,
            values: (0..n).map(|i| f(i as f64 * step)).collect(),
        }
    }

    pub fn at(&self, omega: f64) -> Complex64 {
        let x = omega / self.step;
        let i0 = (x.floor() as isize - 2).clamp(0, self.values.len() as isize - 6) as usize;
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..6 {
            let mut w = 1.0;
            for k in 0..6 {
                if k != j {
                    w *= (x - (i0 + k) as f64) / (j as f64 - k as f64);
                }
            }
            s += self.values[i0 + j] * w;
        }
        s
    }
}

/// Pinned comparison geometries: two identical traps on the x axis.
#[derive(Debug, Clone, Copy)]
pub enum Geometry {
    /// Harmonic ground mode of length `ell`.
    Gaussian { ell: f64, separation: f64, mass: f64 },
    /// Cubic box of side `side` in the (1,1,1) mode.
    Cube { side: f64, separation: f64, mass: f64 },
}

impl Geometry {
    pub fn detectors(&self, gap: f64) -> (DetectorSpec, DetectorSpec, TargetFieldSpec) {
        let (pot, mode, sep, mass) = match *self {
            Geometry::Gaussian { ell, separation, mass } => {
                (PotentialSpec::harmonic(ell, 0.0, [0.0; 3]), [0, 0, 0], separation, mass)
            }
            Geometry::Cube { side, separation, mass } => {
                (PotentialSpec::cube(side, 0.0, [0.0; 3]), [1, 1, 1], separation, mass)
            }
        };
        let a = DetectorSpec {
            potential: pot,
            mode: ModeIndex(mode),
            switching: SwitchingSpec::new(1.0),
            coupling: 1.0,
            gap: Some(gap),
        };
        let b = a.moved_to([sep, 0.0, 0.0]);
        let field = TargetFieldSpec {
            mass,
            ..TargetFieldSpec::massless()
        };
        (a, b, field)
    }

    fn mass(&self) -> f64 {
        match *self {
            Geometry::Gaussian { mass, .. } | Geometry::Cube { mass, .. } => mass,
        }
    }

    /// `∫ d³k/(2π)³ g(ω_k) F̃_A(k) conj(F̃_B(k))`, or with `|F̃|²` when
    /// `with_separation` is false.
    fn k_integral(&self, g: &dyn Fn(f64) -> Complex64, with_separation: bool) -> Complex64 {
        let m = self.mass();
        match *self {
            Geometry::Gaussian { ell, separation, .. } => {
                // Unit-norm Gaussian of width ell: |F̃|² = (4π ell²)^{3/2} e^{-k² ell²},
                // and the direction average of e^{ik·L} is sin(kL)/(kL).
                converged(
                    |k| {
                        let x = k * separation;
                        let sinc = if !with_separation || x == 0.0 { 1.0 } else { x.sin() / x };
                        let ft_sq = (4.0 * PI * ell * ell).powf(1.5) * (-k * k * ell * ell).exp();
                        g((k * k + m * m).sqrt()) * (k * k / (2.0 * PI * PI) * ft_sq * sinc)
                    },
                    0.0,
                    7.0 / ell,
                    64,
                    1e-9,
                )
            }
            Geometry::Cube { side, separation, .. } => {
                let sep = if with_separation { separation } else { 0.0 };
                cube_integral(side, sep, m, CUBE_K_MAX, g)
            }
        }
    }
}

/// Transform of `sqrt(2/d) cos(πu/d)` on `[-d/2, d/2]`.
fn box_axis_transform(q: f64, d: f64) -> f64 {
    let a = PI / d;
    if (q.abs() - a).abs() < 1e-3 * a {
        let (x, w) = gauss_legendre(24);
        return x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| {
                let u = 0.5 * d * xi;
                (2.0 / d).sqrt() * (a * u).cos() * (q * u).cos() * 0.5 * d * wi
            })
            .sum();
    }
    (2.0 / d).sqrt() * (0.5 * q * d).cos() * 2.0 * a / (a * a - q * q)
}

/// Panel edges on [0, k_max]: geometric towards the origin, then uniform.
fn graded_edges(width: f64, k_max: f64) -> Vec<f64> {
    let mut e: Vec<f64> = (0..12).map(|i| width * 0.5f64.powi(12 - i)).collect();
    e.insert(0, 0.0);
    let n = (k_max / width).ceil() as usize;
    e.extend((1..=n).map(|i| width * i as f64));
    e
}

fn nodes(edges: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    edges
        .windows(2)
        .flat_map(|w| {
            let (lo, h) = (w[0], w[1] - w[0]);
            rule.0.iter().zip(&rule.1).map(move |(x, wt)| (lo + 0.5 * h * (x + 1.0), 0.5 * h * wt))
        })
        .collect()
}

pub const CUBE_K_MAX: f64 = 120.0;

/// Cylindrical layout about the separation axis:
/// `(2/(2π)³) ∫_0 dk_x P(k_x) cos(k_x L) ∫_0 ρ dρ Φ(ρ) g(ω)`, with
/// `P = f̃²` and `Φ(ρ) = ∫ dφ P(ρ cos φ) P(ρ sin φ)` computed once per node.
pub fn cube_integral(d: f64, sep: f64, m: f64, k_max: f64, g: &dyn Fn(f64) -> Complex64) -> Complex64 {
    let rule = gauss_legendre(8);
    let p = |q: f64| box_axis_transform(q, d).powi(2);
    let kx = nodes(&graded_edges(0.25, k_max), &rule);
    let rho = nodes(&graded_edges(0.5, k_max), &rule);
    let phi_rule = gauss_legendre(16);
    let phi: Vec<f64> = rho
        .iter()
        .map(|&(r, _)| {
            let panels = 4 * (4 + (r * d / PI).ceil() as usize);
            4.0 * composite(
                &mut |t: f64| Complex64::new(p(r * t.cos()) * p(r * t.sin()), 0.0),
                0.0,
                0.5 * PI,
                panels,
                &phi_rule,
            )
            .re
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &(x, wx) in &kx {
        let outer = p(x) * (x * sep).cos() * wx;
        let mut inner = Complex64::new(0.0, 0.0);
        for (&(r, wr), &ph) in rho.iter().zip(&phi) {
            inner += g((x * x + r * r + m * m).sqrt()) * (r * ph * wr);
        }
        total += inner * outer;
    }
    total * (2.0 / (8.0 * PI * PI * PI))
}

fn omega_ceiling(geom: &Geometry) -> f64 {
    let k = match *geom {
        Geometry::Gaussian { ell, .. } => 7.0 / ell,
        Geometry::Cube { .. } => CUBE_K_MAX * 2f64.sqrt(),
    };
    (k * k + geom.mass().powi(2)).sqrt() + 1.0
}

/// `L_AA = ∫ d³k/((2π)³ 2ω) |χ̃(Ω+ω)|² |F̃|² / (2Ω)` at unit coupling.
pub fn brute_local(geom: &Geometry, gap: f64) -> f64 {
    let table = Table::new(|w| Complex64::new(switching_transform_sq(gap + w), 0.0), omega_ceiling(geom), 0.1);
    geom.k_integral(&|w| table.at(w) / (2.0 * w * 2.0 * gap), false).re
}

/// `M = -∫ d³k/((2π)³ 2ω) J(Ω, ω) F̃_A conj(F̃_B) / (2Ω)` at unit coupling.
pub fn brute_nonlocal(geom: &Geometry, gap: f64) -> Complex64 {
    let table = Table::new(|w| time_ordered_kernel(gap, w), omega_ceiling(geom), 0.1);
    -geom.k_integral(&|w| table.at(w) / (2.0 * w * 2.0 * gap), true)
}

/// Three Gaussian and three box comparison points `(geometry, gap)`.
pub fn pinned_points() -> Vec<(&'static str, Geometry, f64)> {
    vec![
        (
            "gaussian l=0.1 L=5 gap=3",
            Geometry::Gaussian {
                ell: 0.1,
                separation: 5.0,
                mass: 0.0,
            },
            3.0,
        ),
        (
            "gaussian l=0.1 L=5 gap=7.75",
            Geometry::Gaussian {
                ell: 0.1,
                separation: 5.0,
                mass: 0.0,
            },
            7.75,
        ),
        (
            "gaussian l=0.2 L=2 gap=2 m=0.5",
            Geometry::Gaussian {
                ell: 0.2,
                separation: 2.0,
                mass: 0.5,
            },
            2.0,
        ),
        (
            "box d=0.5 L=4.5 gap=3",
            Geometry::Cube {
                side: 0.5,
                separation: 4.5,
                mass: 0.0,
            },
            3.0,
        ),
        (
            "box d=0.5 L=4.5 gap=7",
            Geometry::Cube {
                side: 0.5,
                separation: 4.5,
                mass: 0.0,
            },
            7.0,
        ),
        (
            "box d=0.5 L=5 gap=7.5",
            Geometry::Cube {
                side: 0.5,
                separation: 5.0,
                mass: 0.0,
            },
            7.5,
        ),
    ]
}
