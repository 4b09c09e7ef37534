//! One-dimensional quadrature rules shared by every integral in the crate.
//!
//! Integrands are complex-valued. The adaptive driver is a globally adaptive
//! bisection scheme on the 21-point Gauss–Kronrod pair, using the QUADPACK
//! error heuristic. Fixed composite Gauss–Legendre rules are provided for
//! tensor-product integration where node reuse matters more than adaptivity.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1] for the 21-point rule. Odd positions (1, 3, ...)
/// are shared with the embedded 10-point Gauss rule.
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Result of a quadrature together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub fn zero() -> Self {
        Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        }
    }
}

/// Stopping rule for the adaptive driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evaluations: usize,
}

impl Tolerance {
    pub fn target(&self, value: Complex64) -> f64 {
        self.abs.max(self.rel * value.norm())
    }
}

/// Output of one 21-point Gauss–Kronrod panel.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub kronrod: Complex64,
    pub gauss: Complex64,
    /// QUADPACK-style error estimate for the Kronrod value.
    pub error: f64,
    /// Integral of |f| over the panel (Kronrod weights).
    pub abs_integral: f64,
}

/// Maps the 21 Kronrod abscissae onto `[a, b]`, ordered as
/// `centre, centre ± h x_j` for `j = 0..10`.
pub fn gk21_nodes(a: f64, b: f64) -> [f64; 21] {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [centre; 21];
    for j in 0..10 {
        out[1 + 2 * j] = centre - half * XGK21[j];
        out[2 + 2 * j] = centre + half * XGK21[j];
    }
    out
}

/// Combines precomputed function values at [`gk21_nodes`] into a panel.
pub fn gk21_combine(a: f64, b: f64, values: &[Complex64; 21]) -> Panel {
    let half = 0.5 * (b - a);
    let fc = values[0];
    let mut kronrod = fc * WGK21[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_integral = fc.norm() * WGK21[10];
    for j in 0..10 {
        let f1 = values[1 + 2 * j];
        let f2 = values[2 + 2 * j];
        kronrod += (f1 + f2) * WGK21[j];
        abs_integral += (f1.norm() + f2.norm()) * WGK21[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG10[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = (fc - mean).norm() * WGK21[10];
    for j in 0..10 {
        asc += ((values[1 + 2 * j] - mean).norm() + (values[2 + 2 * j] - mean).norm()) * WGK21[j];
    }
    let scale = half.abs();
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    let abs_integral = abs_integral * scale;
    let asc = asc * scale;
    let mut error = (kronrod - gauss).norm();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_integral > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_integral);
    }
    Panel {
        a,
        b,
        kronrod,
        gauss,
        error,
        abs_integral,
    }
}

/// Evaluates one 21-point Gauss–Kronrod panel.
pub fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let nodes = gk21_nodes(a, b);
    let mut values = [Complex64::new(0.0, 0.0); 21];
    for (v, &x) in values.iter_mut().zip(nodes.iter()) {
        *v = f(x);
    }
    gk21_combine(a, b, &values)
}

/// Globally adaptive integration of `f` over `[a, b]`.
pub fn adaptive<F: FnMut(f64) -> Complex64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    adaptive_with_breaks(f, &[a, b], tol)
}

/// Adaptive integration starting from the given breakpoints. Supplying an
/// initial partition helps with oscillatory integrands whose features a
/// single coarse panel could miss.
pub fn adaptive_with_breaks<F: FnMut(f64) -> Complex64>(
    mut f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    assert!(breaks.len() >= 2, "need at least one interval");
    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk21(&mut f, w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Ok(Estimate::zero());
    }
    let mut evaluations = 21 * panels.len();
    loop {
        let value: Complex64 = panels.iter().map(|p| p.kronrod).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= tol.target(value) {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        if evaluations + 42 > tol.max_evaluations {
            return Err(Error::ToleranceNotMet {
                value: value.norm(),
                error,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty panel list");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Interval cannot be split further in floating point.
            return Err(Error::ToleranceNotMet {
                value: value.norm(),
                error,
            });
        }
        panels.push(gk21(&mut f, p.a, mid));
        panels.push(gk21(&mut f, mid, p.b));
        evaluations += 42;
    }
}

/// Real-valued convenience wrapper around [`adaptive`].
pub fn adaptive_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<(f64, f64)> {
    let est = adaptive(|x| Complex64::new(f(x), 0.0), a, b, tol)?;
    Ok((est.value.re, est.error))
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre
    /// recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights of the composite rule with `panels` equal panels
    /// on `[a, b]`.
    pub fn composite(&self, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let h = (b - a) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.len());
        let mut ws = Vec::with_capacity(panels * self.len());
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                xs.push(lo + 0.5 * h * (x + 1.0));
                ws.push(0.5 * h * w);
            }
        }
        (xs, ws)
    }

    /// Composite integration of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> Complex64 {
        let (xs, ws) = self.composite(a, b, panels);
        xs.iter().zip(&ws).map(|(&x, &w)| f(x) * w).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss–Legendre integration with panel doubling until two
/// successive refinements agree. Returns the finer value and the difference
/// as the error estimate.
pub fn composite_converged<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    rule: &GaussLegendre,
    start_panels: usize,
    tol: Tolerance,
) -> Result<Estimate> {
    let mut panels = start_panels.max(1);
    let mut coarse = rule.integrate(&mut f, a, b, panels);
    let mut evaluations = panels * rule.len();
    loop {
        panels *= 2;
        let fine = rule.integrate(&mut f, a, b, panels);
        evaluations += panels * rule.len();
        let error = (fine - coarse).norm();
        if error <= tol.target(fine) {
            return Ok(Estimate {
                value: fine,
                error,
                evaluations,
            });
        }
        if evaluations + 2 * panels * rule.len() > tol.max_evaluations {
            return Err(Error::ToleranceNotMet {
                value: fine.norm(),
                error,
            });
        }
        coarse = fine;
    }
}
