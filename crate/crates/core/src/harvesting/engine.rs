//! Radial integration with per-node caching.
//!
//! Every term is `∫_0^K dk k² / (2π²) · (1/2ω) · τ(Ω, ω) · A(k)` where `A` is
//! a direction average (see `angular`) and `τ` a time kernel. Neither `A`
//! nor the numerical lag factor of the time-ordered kernel depends on the
//! gap, so both are stored per radial node. Re-evaluating a pair at a new gap
//! only recombines cached columns.
//!
//! The radial axis is cut into equal panels. With Gauss–Kronrod panels the
//! error estimate is the QUADPACK one per panel; with Gauss–Legendre panels
//! it is the change under panel doubling. If a term misses its tolerance the
//! panels are halved, or the cut-off raised when the truncated tail
//! dominates, and the columns are rebuilt.

use num_complex::Complex64;

use super::angular::{map_indices, AngularPlan, AngularValue, Requested, Side};
use super::{negativity_closed, ErrorBounds, HarvestingResult};
use crate::error::{Error, Result};
use crate::kernels::{self, lag_tolerance, LagPart, QuadratureMethod, QuadratureSettings, TargetFieldSpec};
use crate::quadrature::{gk21_combine, gk21_nodes, Estimate, GaussLegendre};
use crate::smearing::{switching_fourier_sq, DetectorSpec};

const MAX_REFINEMENTS: usize = 6;
/// Local terms carry `exp(-ω²T²/π)`; beyond `ω T = sqrt(80π)` it is below e^{-80}.
const LOCAL_CUTOFF: f64 = 15.853_309_190_424_043;
const INV_TWO_PI_SQ: f64 = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::PI);

/// Individual scalars of the leading-order state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Term {
    LocalAA,
    LocalBB,
    LocalAB,
    SelfA,
    SelfB,
    NonLocal,
    Commutator,
}

impl Term {
    fn is_local(self) -> bool {
        matches!(self, Term::LocalAA | Term::LocalBB | Term::LocalAB)
    }

    fn pair(self) -> PairSlot {
        match self {
            Term::LocalAA | Term::SelfA => PairSlot::AA,
            Term::LocalBB | Term::SelfB => PairSlot::BB,
            _ => PairSlot::AB,
        }
    }

    fn lag(self) -> Option<LagSlot> {
        match self {
            Term::SelfA => Some(LagSlot::A),
            Term::SelfB => Some(LagSlot::B),
            Term::NonLocal => Some(LagSlot::AB),
            Term::Commutator => Some(LagSlot::CommAB),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PairSlot {
    AA = 0,
    BB = 1,
    AB = 2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LagSlot {
    A = 0,
    B = 1,
    AB = 2,
    CommAB = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RadialRule {
    Kronrod,
    Legendre,
}

#[derive(Debug, Clone)]
struct Grid {
    rule: RadialRule,
    k_max: f64,
    panels: usize,
    nodes: Vec<f64>,
    /// Quadrature weights (Legendre only; Kronrod panels are combined with
    /// their own weights).
    weights: Vec<f64>,
    omega: Vec<f64>,
    ang: [Option<Vec<AngularValue>>; 3],
    lag: [Option<Vec<(Complex64, f64)>>; 4],
}

impl Grid {
    fn new(rule: RadialRule, k_max: f64, panels: usize, field: &TargetFieldSpec, gl: &GaussLegendre) -> Result<Self> {
        let h = k_max / panels as f64;
        let (nodes, weights) = match rule {
            RadialRule::Kronrod => {
                let mut xs = Vec::with_capacity(21 * panels);
                for p in 0..panels {
                    xs.extend_from_slice(&gk21_nodes(p as f64 * h, (p + 1) as f64 * h));
                }
                (xs, Vec::new())
            }
            RadialRule::Legendre => gl.composite(0.0, k_max, panels),
        };
        let omega = nodes
            .iter()
            .map(|&k| kernels::omega_k(k, field))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Grid {
            rule,
            k_max,
            panels,
            nodes,
            weights,
            omega,
            ang: [None, None, None],
            lag: [None, None, None, None],
        })
    }

    /// Integral of the node values, its radial error estimate (Kronrod
    /// only), and the largest |value| on the outermost panel.
    fn integrate(&self, values: &[Complex64]) -> (Complex64, f64, f64) {
        let per_panel = self.nodes.len() / self.panels;
        let last = &values[values.len() - per_panel..];
        let edge = last.iter().map(|v| v.norm()).fold(0.0, f64::max);
        match self.rule {
            RadialRule::Kronrod => {
                let h = self.k_max / self.panels as f64;
                let mut total = Complex64::new(0.0, 0.0);
                let mut err = 0.0;
                for p in 0..self.panels {
                    let mut buf = [Complex64::new(0.0, 0.0); 21];
                    buf.copy_from_slice(&values[21 * p..21 * p + 21]);
                    let panel = gk21_combine(p as f64 * h, (p + 1) as f64 * h, &buf);
                    total += panel.kronrod;
                    err += panel.error;
                }
                (total, err, edge)
            }
            RadialRule::Legendre => {
                let total = values.iter().zip(&self.weights).map(|(v, w)| v * *w).sum();
                (total, 0.0, edge)
            }
        }
    }

    /// Integral of non-negative node values (for error propagation).
    fn integrate_abs(&self, values: &[f64]) -> f64 {
        match self.rule {
            RadialRule::Kronrod => {
                let h = self.k_max / self.panels as f64;
                let mut total = 0.0;
                for p in 0..self.panels {
                    let mut buf = [Complex64::new(0.0, 0.0); 21];
                    for (b, v) in buf.iter_mut().zip(&values[21 * p..21 * p + 21]) {
                        *b = Complex64::new(*v, 0.0);
                    }
                    total += gk21_combine(p as f64 * h, (p + 1) as f64 * h, &buf).abs_integral;
                }
                total
            }
            RadialRule::Legendre => values.iter().zip(&self.weights).map(|(v, w)| v * w).sum(),
        }
    }
}

/// Computes the harvesting scalars of one ordered detector pair, caching
/// gap-independent data between calls.
#[derive(Debug, Clone)]
pub struct PairIntegrator {
    a: DetectorSpec,
    b: DetectorSpec,
    field: TargetFieldSpec,
    settings: QuadratureSettings,
    sides: [Side; 2],
    separation: [f64; 3],
    base_width: f64,
    panels_per_unit: f64,
    k_scale: f64,
    grids: Vec<Grid>,
    plans: [Option<(f64, AngularPlan)>; 3],
    gl: GaussLegendre,
}

/// One computed term with its error budget.
#[derive(Debug, Clone, Copy)]
struct TermValue {
    value: Complex64,
    error: f64,
    tail: f64,
    /// Part of `error` due to the direction averages, which radial
    /// refinement cannot reduce.
    angular: f64,
}

impl PairIntegrator {
    pub fn new(a: &DetectorSpec, b: &DetectorSpec, field: &TargetFieldSpec, settings: &QuadratureSettings) -> Result<Self> {
        a.validate()?;
        b.validate()?;
        field.validate()?;
        settings.validate()?;
        let separation = [
            a.potential.center[0] - b.potential.center[0],
            a.potential.center[1] - b.potential.center[1],
            a.potential.center[2] - b.potential.center[2],
        ];
        let sep_norm = separation.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sides = [Side::of(a), Side::of(b)];
        let t_min = a.switching.timescale.min(b.switching.timescale);
        let lag = (a.switching.center_time - b.switching.center_time).abs();
        let spread = sep_norm + 2.0 * (a.spatial_radius().min(4.0 * a.potential.scale) + b.spatial_radius().min(4.0 * b.potential.scale)) + lag;
        let base_width = (1.0 / t_min).min(2.0 * std::f64::consts::PI / spread.max(1e-300));
        Ok(PairIntegrator {
            a: *a,
            b: *b,
            field: *field,
            settings: *settings,
            sides,
            separation,
            base_width,
            panels_per_unit: 1.0 / base_width,
            k_scale: 1.0,
            grids: Vec::new(),
            plans: [None, None, None],
            gl: GaussLegendre::new(16),
        })
    }

    fn pair_cutoff(&self, slot: PairSlot) -> f64 {
        let rel = self.settings.rel_tol;
        let (x, y) = match slot {
            PairSlot::AA => (self.sides[0], self.sides[0]),
            PairSlot::BB => (self.sides[1], self.sides[1]),
            PairSlot::AB => (self.sides[0], self.sides[1]),
        };
        let (kx, ky) = (x.k_max(rel), y.k_max(rel));
        match (x.is_harmonic(), y.is_harmonic()) {
            (true, true) => kx.min(ky),
            (true, false) => kx,
            (false, true) => ky,
            (false, false) => kx.max(ky),
        }
    }

    fn required_k_max(&self, terms: &[Term]) -> f64 {
        let t_min = self.a.switching.timescale.min(self.b.switching.timescale);
        let mut k: f64 = 0.0;
        for &t in terms {
            let mut kt = self.pair_cutoff(t.pair()) * self.k_scale;
            if t.is_local() {
                kt = kt.min(LOCAL_CUTOFF / t_min);
            }
            k = k.max(kt);
        }
        k
    }

    fn rule(&self) -> RadialRule {
        match self.settings.method {
            QuadratureMethod::TensorGl => RadialRule::Legendre,
            _ => RadialRule::Kronrod,
        }
    }

    fn ensure_grids(&mut self, k_max: f64) -> Result<()> {
        let panels = ((k_max * self.panels_per_unit).ceil() as usize).max(2);
        let fits = !self.grids.is_empty() && self.grids[0].k_max >= k_max && self.grids.last().map(|g| g.panels) == Some(self.expected_panels(panels));
        if fits {
            return Ok(());
        }
        let rule = self.rule();
        self.grids.clear();
        match rule {
            RadialRule::Kronrod => self.grids.push(Grid::new(rule, k_max, panels, &self.field, &self.gl)?),
            RadialRule::Legendre => {
                self.grids.push(Grid::new(rule, k_max, panels, &self.field, &self.gl)?);
                self.grids.push(Grid::new(rule, k_max, 2 * panels, &self.field, &self.gl)?);
            }
        }
        Ok(())
    }

    fn expected_panels(&self, panels: usize) -> usize {
        match self.rule() {
            RadialRule::Kronrod => panels,
            RadialRule::Legendre => 2 * panels,
        }
    }

    fn plan(&mut self, slot: PairSlot, k_max: f64) -> &AngularPlan {
        let stale = match &self.plans[slot as usize] {
            Some((k, _)) => *k < k_max,
            None => true,
        };
        if stale {
            let (i, j, sep) = match slot {
                PairSlot::AA => (self.sides[0], self.sides[0], [0.0; 3]),
                PairSlot::BB => (self.sides[1], self.sides[1], [0.0; 3]),
                PairSlot::AB => (self.sides[0], self.sides[1], self.separation),
            };
            let how = match self.settings.method {
                QuadratureMethod::MonteCarlo { seed, samples } => Requested::MonteCarlo {
                    seed: seed ^ (slot as u64).wrapping_mul(0xD1B5_4A32_D192_ED03),
                    samples,
                },
                _ => Requested::Deterministic {
                    force_directional: self.settings.force_full_3d,
                },
            };
            self.plans[slot as usize] = Some((k_max, AngularPlan::new(i, j, sep, k_max, how)));
        }
        &self.plans[slot as usize].as_ref().expect("plan just built").1
    }

    fn ensure_columns(&mut self, terms: &[Term]) -> Result<()> {
        for gi in 0..self.grids.len() {
            let k_max = self.grids[gi].k_max;
            for &t in terms {
                let slot = t.pair();
                if self.grids[gi].ang[slot as usize].is_none() {
                    // Self pairs of identical geometry share their columns.
                    let shared = if slot == PairSlot::BB && self.same_shape() {
                        self.grids[gi].ang[PairSlot::AA as usize].clone()
                    } else {
                        None
                    };
                    let column = match shared {
                        Some(c) => c,
                        None => {
                            let plan = self.plan(slot, k_max).clone();
                            let nodes = &self.grids[gi].nodes;
                            let mut col = map_indices(nodes.len(), |n| plan.average(nodes[n], n, n % 16 == 5));
                            calibrate_angular_errors(&mut col);
                            col
                        }
                    };
                    self.grids[gi].ang[slot as usize] = Some(column);
                }
                if let Some(ls) = t.lag() {
                    if self.grids[gi].lag[ls as usize].is_none() {
                        let shared = if ls == LagSlot::B && self.a.switching.timescale == self.b.switching.timescale {
                            self.grids[gi].lag[LagSlot::A as usize].clone()
                        } else {
                            None
                        };
                        let column = match shared {
                            Some(c) => c,
                            None => self.lag_column(gi, ls)?,
                        };
                        self.grids[gi].lag[ls as usize] = Some(column);
                    }
                }
            }
        }
        Ok(())
    }

    fn same_shape(&self) -> bool {
        self.a.potential.kind == self.b.potential.kind
            && self.a.potential.scale == self.b.potential.scale
            && self.a.mode == self.b.mode
    }

    fn lag_column(&self, gi: usize, slot: LagSlot) -> Result<Vec<(Complex64, f64)>> {
        let (t, delta, part) = match slot {
            LagSlot::A => (self.a.switching.timescale, 0.0, LagPart::Full),
            LagSlot::B => (self.b.switching.timescale, 0.0, LagPart::Full),
            LagSlot::AB => (
                self.a.switching.timescale,
                self.a.switching.center_time - self.b.switching.center_time,
                LagPart::Full,
            ),
            LagSlot::CommAB => (
                self.a.switching.timescale,
                self.a.switching.center_time - self.b.switching.center_time,
                LagPart::Commutator,
            ),
        };
        let settings = self.settings;
        let omega = &self.grids[gi].omega;
        let col: Vec<Result<(Complex64, f64)>> = map_indices(omega.len(), |n| {
            let w = omega[n];
            let est: Estimate = kernels::lag_factor(w, t, delta, part, lag_tolerance(w, t, &settings))?;
            Ok((est.value, est.error))
        });
        col.into_iter().collect()
    }

    /// Evaluates one term on one grid.
    fn term_on_grid(&self, gi: usize, term: Term, gap: f64) -> TermValue {
        let g = &self.grids[gi];
        let ang = g.ang[term.pair() as usize].as_ref().expect("columns built");
        let (la, lb) = (self.a.coupling, self.b.coupling);
        let (sa, sb) = (&self.a.switching, &self.b.switching);
        let n = g.nodes.len();
        let mut values = Vec::with_capacity(n);
        let mut ang_err = Vec::with_capacity(n);
        let mut lag_err = Vec::with_capacity(n);
        for i in 0..n {
            let k = g.nodes[i];
            let w = g.omega[i];
            let base = INV_TWO_PI_SQ * k * k / (2.0 * w) / (2.0 * gap);
            let a = ang[i];
            let (factor, lerr): (Complex64, f64) = match term {
                Term::LocalAA => (Complex64::new(la * la * switching_fourier_sq(sa, gap + w), 0.0), 0.0),
                Term::LocalBB => (Complex64::new(lb * lb * switching_fourier_sq(sb, gap + w), 0.0), 0.0),
                Term::LocalAB => {
                    let nu = gap + w;
                    let phase = Complex64::from_polar(1.0, nu * (sa.center_time - sb.center_time));
                    (phase * (la * lb * switching_fourier_sq(sa, nu)), 0.0)
                }
                Term::SelfA | Term::SelfB | Term::NonLocal | Term::Commutator => {
                    let (s1, s2, sign, lam) = match term {
                        Term::SelfA => (sa, sa, 1.0, la * la),
                        Term::SelfB => (sb, sb, 1.0, lb * lb),
                        _ => (sa, sb, -1.0, la * lb),
                    };
                    let pre = kernels::gap_prefactor(gap, s1, s2) * (sign * lam);
                    let (v, e) = g.lag[term.lag().expect("time-ordered term") as usize].as_ref().expect("columns built")[i];
                    (pre * v, pre.norm() * e)
                }
            };
            let ang_value = if term.is_local() { a.value.conj() } else { a.value };
            values.push(factor * ang_value * base);
            ang_err.push(factor.norm() * a.error * base);
            lag_err.push(lerr * a.value.norm() * base);
        }
        let (value, radial_err, edge) = g.integrate(&values);
        let angular = g.integrate_abs(&ang_err);
        let err = radial_err + angular + g.integrate_abs(&lag_err);
        // Power-law tails (box transforms) decay at least like k^-5 past the
        // cut-off; edge * K / 4 bounds the remainder.
        let tail = edge * g.k_max / 4.0;
        TermValue {
            value,
            error: err + tail,
            tail,
            angular,
        }
    }

    fn term_value(&self, term: Term, gap: f64) -> TermValue {
        match self.grids.len() {
            1 => self.term_on_grid(0, term, gap),
            _ => {
                let coarse = self.term_on_grid(0, term, gap);
                let fine = self.term_on_grid(1, term, gap);
                TermValue {
                    value: fine.value,
                    error: fine.error + (fine.value - coarse.value).norm(),
                    tail: fine.tail,
                    angular: fine.angular,
                }
            }
        }
    }

    fn gaps(&self, gap: Option<f64>) -> Result<(f64, f64)> {
        match gap {
            Some(g) => {
                if !(g > 0.0 && g.is_finite()) {
                    return Err(Error::param("gap", format!("must be positive, got {g}")));
                }
                Ok((g, g))
            }
            None => Ok((self.a.gap()?, self.b.gap()?)),
        }
    }

    fn compute(&mut self, terms: &[Term], gap: Option<f64>) -> Result<Vec<TermValue>> {
        let (ga, gb) = self.gaps(gap)?;
        let cross = terms.iter().any(|t| matches!(t, Term::LocalAB | Term::NonLocal | Term::Commutator));
        if cross {
            if ga != gb {
                return Err(Error::GapMismatch(ga, gb));
            }
            kernels::check_same_timescale(&self.a.switching, &self.b.switching)?;
        }
        let gap_of = |t: Term| match t {
            Term::LocalBB | Term::SelfB => gb,
            _ => ga,
        };
        let mut last = Vec::new();
        for round in 0..=MAX_REFINEMENTS {
            let k_max = self.required_k_max(terms);
            self.ensure_grids(k_max)?;
            self.ensure_columns(terms)?;
            let values: Vec<TermValue> = terms.iter().map(|&t| self.term_value(t, gap_of(t))).collect();
            let targets = self.targets(terms, &values);
            let failing: Vec<usize> = (0..terms.len()).filter(|&i| values[i].error > targets[i]).collect();
            if failing.is_empty() {
                return Ok(values);
            }
            last = failing.iter().map(|&i| values[i]).collect();
            let stuck = failing.iter().any(|&i| values[i].angular > targets[i]);
            if round == MAX_REFINEMENTS || stuck {
                break;
            }
            let tail_bound = failing.iter().any(|&i| values[i].tail > 0.5 * values[i].error);
            if tail_bound {
                self.k_scale *= 1.5;
            } else {
                self.panels_per_unit *= 2.0;
            }
            self.grids.clear();
        }
        let worst = last
            .iter()
            .max_by(|x, y| x.error.total_cmp(&y.error))
            .copied()
            .unwrap_or(TermValue {
                value: Complex64::new(0.0, 0.0),
                error: f64::INFINITY,
                tail: 0.0,
                angular: 0.0,
            });
        Err(Error::ToleranceNotMet {
            value: worst.value.norm(),
            error: worst.error,
        })
    }

    /// Error targets. Cross terms are judged against the local terms when
    /// those are part of the same request: a cross term far below
    /// `sqrt(L_AA L_BB)` has no effect on the state beyond that accuracy.
    fn targets(&self, terms: &[Term], values: &[TermValue]) -> Vec<f64> {
        let find = |t: Term| terms.iter().position(|&x| x == t).map(|i| values[i].value.norm());
        let local_scale = match (find(Term::LocalAA), find(Term::LocalBB)) {
            (Some(x), Some(y)) => (x * y).sqrt(),
            _ => 0.0,
        };
        let m_scale = find(Term::NonLocal);
        let (abs, rel) = (self.settings.abs_tol, self.settings.rel_tol);
        terms
            .iter()
            .zip(values)
            .map(|(&t, v)| {
                let magnitude = match t {
                    Term::LocalAB | Term::NonLocal => v.value.norm().max(local_scale),
                    Term::Commutator => m_scale.unwrap_or(0.0).max(v.value.norm()),
                    _ => v.value.norm(),
                };
                abs.max(rel * magnitude)
            })
            .collect()
    }

    /// A single term, optionally at a gap other than the detectors' own.
    pub fn term(&mut self, term: Term, gap: Option<f64>) -> Result<Estimate> {
        let v = self.compute(&[term], gap)?;
        Ok(Estimate {
            value: v[0].value,
            error: v[0].error,
            evaluations: 0,
        })
    }

    /// All scalars of the pair state. `gap` overrides both detector gaps.
    pub fn evaluate(&mut self, gap: Option<f64>) -> Result<HarvestingResult> {
        let terms = [
            Term::LocalAA,
            Term::LocalBB,
            Term::LocalAB,
            Term::SelfA,
            Term::SelfB,
            Term::NonLocal,
            Term::Commutator,
        ];
        let v = self.compute(&terms, gap)?;
        let l_aa = v[0].value.re.max(0.0);
        let l_bb = v[1].value.re.max(0.0);
        let m = v[5].value;
        let comm = v[6].value.norm();
        Ok(HarvestingResult {
            l_aa,
            l_bb,
            l_ab: v[2].value,
            k_a: v[3].value,
            k_b: v[4].value,
            m,
            negativity: negativity_closed(l_aa, l_bb, m)?,
            comm_estimate: comm,
            comm_ratio: if m.norm() > 0.0 { comm / m.norm() } else { 0.0 },
            errors: ErrorBounds {
                l_aa: v[0].error,
                l_bb: v[1].error,
                l_ab: v[2].error,
                k_a: v[3].error,
                k_b: v[4].error,
                m: v[5].error,
                comm: v[6].error,
            },
        })
    }

    /// Width of the initial radial panels.
    pub fn panel_width(&self) -> f64 {
        1.0 / self.panels_per_unit
    }

    pub fn base_panel_width(&self) -> f64 {
        self.base_width
    }
}

/// Spreads the explicit error check made at one node of every block of 16
/// over the rest of that block, in proportion to the integrand's absolute
/// size.
fn calibrate_angular_errors(col: &mut [AngularValue]) {
    for block in col.chunks_mut(16) {
        let ratio = block
            .get(5)
            .filter(|a| a.abs_mean > 0.0)
            .map(|a| a.error / a.abs_mean)
            .unwrap_or(0.0);
        for a in block.iter_mut() {
            a.error = a.error.max(ratio * a.abs_mean);
        }
    }
}
