//! Mixedness of a Gaussian field mode inside a harmonic trap.
//!
//! A mode with profile `f(x) ∝ exp(-|x|²/2σ²)` in `d` dimensions overlaps
//! only with the even normal modes of a trap of scale `ℓ`. Writing
//! `r = ln(σ/ℓ)`, `x = tanh²r / 4` and `w_n = sqrt((mℓ)² + 4n + d)`, the
//! quadrature variances (in units where `ℓ = 1`) are
//!
//! `⟨Q²⟩ = ½ cosh^{-d} r Σ_n x^n F_d(n) / w_n`,
//! `⟨P²⟩ = ½ cosh^{-d} r Σ_n x^n F_d(n) w_n`,
//!
//! and the symplectic eigenvalue is `ν = 2 sqrt(⟨Q²⟩⟨P²⟩)`. `F_d(n)` is the
//! coefficient of `z^n` in `(1 - 4z)^{-d/2}`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::ModeIndex;

/// Largest `n` accepted by [`f_weight`].
pub const MAX_SERIES_TERMS: usize = 10_000;

/// Term cap of the variance series. The terms are generated by an exact
/// ratio recurrence in floating point, so the cap can exceed the exact
/// integer guard.
pub const MAX_FLOAT_TERMS: usize = 2_000_000;

/// Number of consecutive negligible terms required before stopping.
const QUIET_TERMS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuritySpec {
    pub sigma: f64,
    pub ell: f64,
    /// The dimensionless product `m ℓ` of probe mass and trap scale.
    pub mass_ell: f64,
    pub dim: u32,
    pub series_rel_tol: f64,
}

impl PuritySpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !(self.ell > 0.0 && self.ell.is_finite()) {
            return Err(Error::param("ell", format!("must be positive, got {}", self.ell)));
        }
        if !(self.mass_ell >= 0.0 && self.mass_ell.is_finite()) {
            return Err(Error::param("mass_ell", format!("must be non-negative, got {}", self.mass_ell)));
        }
        check_dim(self.dim)?;
        if !(self.series_rel_tol > 0.0 && self.series_rel_tol < 1.0) {
            return Err(Error::param("series_rel_tol", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurityResult {
    pub nu: f64,
    /// `⟨Q²⟩` in units of `ℓ`.
    pub qq_var: f64,
    /// `⟨P²⟩` in units of `1/ℓ`.
    pub pp_var: f64,
    pub terms_used: usize,
    /// Bound on the relative truncation error of either series.
    pub truncation_bound: f64,
    /// `Σ c²` over the terms used; tends to 1.
    pub completeness: f64,
}

fn check_dim(dim: u32) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(Error::param("dim", format!("must be 1, 2 or 3, got {dim}")));
    }
    Ok(())
}

pub fn squeezing_parameter(sigma: f64, ell: f64) -> f64 {
    (sigma / ell).ln()
}

/// `F_d(n)`: sum over `d`-tuples with `Σ n_i = n` of `Π binom(2 n_i, n_i)`,
/// by repeated convolution of the central binomial sequence.
pub fn f_weight(n: usize, dim: u32) -> Result<BigUint> {
    check_dim(dim)?;
    if n > MAX_SERIES_TERMS {
        return Err(Error::GuardExceeded { n, max: MAX_SERIES_TERMS });
    }
    let central = central_binomials(n);
    let mut acc = central.clone();
    for _ in 1..dim {
        let mut next = vec![BigUint::zero(); n + 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, c) in central.iter().take(n + 1 - i).enumerate() {
                next[i + j] += a * c;
            }
        }
        acc = next;
    }
    Ok(acc.swap_remove(n))
}

/// `binom(2k, k)` for `k = 0..=n`.
fn central_binomials(n: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = BigUint::one();
    out.push(c.clone());
    for k in 1..=n {
        // binom(2k, k) = binom(2k-2, k-1) * 2(2k-1) / k, exact at every step.
        c = c * BigUint::from(2 * (2 * k - 1)) / BigUint::from(k);
        out.push(c.clone());
    }
    out
}

/// `c²` of the even mode `2n` for squeezing `r`. Only the first `dim`
/// components of `n` are used.
pub fn overlap_coeff_sq(n: ModeIndex, r: f64, dim: u32) -> f64 {
    let dim = dim.clamp(1, 3) as usize;
    let x = r.tanh().powi(2) / 4.0;
    let mut value = r.cosh().powi(-(dim as i32));
    for &ni in &n.0[..dim] {
        // x^m binom(2m, m), built up factor by factor.
        for k in 1..=ni as usize {
            value *= x * (2.0 * (2 * k - 1) as f64) / k as f64;
        }
    }
    value
}

/// Evaluates both variance series and the symplectic eigenvalue.
pub fn symplectic_eigenvalue(p: &PuritySpec) -> Result<PurityResult> {
    p.validate()?;
    let r = squeezing_parameter(p.sigma, p.ell);
    let d = p.dim as f64;
    let t2 = r.tanh().powi(2);
    let x = t2 / 4.0;
    let m2 = p.mass_ell * p.mass_ell;
    let w = |n: usize| (m2 + 4.0 * n as f64 + d).sqrt();
    // cosh^{-d} r applied up front keeps every partial sum O(1).
    let pre = r.cosh().powi(-(p.dim as i32));

    let mut weight = pre; // cosh^{-d} r · x^n F_d(n)
    let mut s_p = weight * w(0);
    let mut s_q = weight / w(0);
    let mut norm = weight;
    let mut quiet = 0;
    let mut n = 0;
    let mut bound = f64::INFINITY;
    while n < MAX_FLOAT_TERMS {
        n += 1;
        weight *= x * 2.0 * (2.0 * n as f64 + d - 2.0) / n as f64;
        let (tp, tq) = (weight * w(n), weight / w(n));
        s_p += tp;
        s_q += tq;
        norm += weight;
        let negligible = tp <= p.series_rel_tol * s_p && tq <= p.series_rel_tol * s_q;
        quiet = if negligible { quiet + 1 } else { 0 };
        bound = tail_bound(pre, t2, p.dim, m2, n).map_or(f64::INFINITY, |b| (b / s_p).max(b / (s_q * w(n + 1) * w(n + 1))));
        if quiet >= QUIET_TERMS && bound < p.series_rel_tol {
            let qq_var = 0.5 * s_q;
            let pp_var = 0.5 * s_p;
            return Ok(PurityResult {
                nu: 2.0 * (qq_var * pp_var).sqrt(),
                qq_var,
                pp_var,
                terms_used: n + 1,
                truncation_bound: bound,
                completeness: norm,
            });
        }
    }
    Err(Error::TruncationFailure {
        terms: n + 1,
        partial_nu: (s_p * s_q).sqrt(),
        tail_bound: bound,
    })
}

/// Bound on `Σ_{k>n} cosh^{-d} r · x^k F_d(k) w_k` from `binom(2k, k) ≤ 4^k`:
/// the summand is at most `pre · t^{2k} binom(k+d-1, d-1) w_k`, whose
/// successive ratios decrease in `k`. Dividing by `w_{n+1}²` bounds the `1/w`
/// series, since `w_k` increases.
fn tail_bound(pre: f64, t2: f64, dim: u32, m2: f64, n: usize) -> Option<f64> {
    let d = dim as f64;
    let w = |k: f64| (m2 + 4.0 * k + d).sqrt();
    let k = (n + 1) as f64;
    let multiset = match dim {
        1 => 1.0,
        2 => k + 1.0,
        _ => (k + 1.0) * (k + 2.0) / 2.0,
    };
    let first = pre * t2.powf(k) * multiset * w(k);
    let ratio = t2 * ((k + d) / (k + 1.0)) * (w(k + 1.0) / w(k));
    (ratio < 1.0).then(|| first / (1.0 - ratio))
}

/// Range of `σ/ℓ` around 1 on which `ν ≤ 1 + excess`, found by bisection in
/// `|r|`. The interval is symmetric under `σ/ℓ → ℓ/σ`.
pub fn purity_interval(mass_ell: f64, dim: u32, excess: f64, series_rel_tol: f64) -> Result<(f64, f64)> {
    let nu_at = |r: f64| -> Result<f64> {
        Ok(symplectic_eigenvalue(&PuritySpec {
            sigma: r.exp(),
            ell: 1.0,
            mass_ell,
            dim,
            series_rel_tol,
        })?
        .nu)
    };
    let target = 1.0 + excess;
    let (mut lo, mut hi) = (0.0, 0.5);
    while nu_at(hi)? <= target {
        lo = hi;
        hi += 0.5;
        if hi > 6.0 {
            return Err(Error::Domain("purity threshold not crossed for |ln(σ/ℓ)| ≤ 6".into()));
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if nu_at(mid)? <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(((-lo).exp(), lo.exp()))
}

/// `F_d(n)` as a float, for plotting and diagnostics.
pub fn f_weight_f64(n: usize, dim: u32) -> Result<f64> {
    Ok(f_weight(n, dim)?.to_f64().unwrap_or(f64::INFINITY))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(ratio: f64, dim: u32) -> PuritySpec {
        PuritySpec {
            sigma: ratio,
            ell: 1.0,
            mass_ell: 10.0,
            dim,
            series_rel_tol: 1e-14,
        }
    }

    fn brute_force(n: usize, dim: u32) -> u128 {
        fn binom(a: u128, b: u128) -> u128 {
            (0..b).fold(1, |acc, i| acc * (a - i) / (i + 1))
        }
        let cb = |k: usize| binom(2 * k as u128, k as u128);
        let mut total = 0;
        match dim {
            1 => total = cb(n),
            2 => {
                for i in 0..=n {
                    total += cb(i) * cb(n - i);
                }
            }
            _ => {
                for i in 0..=n {
                    for j in 0..=n - i {
                        total += cb(i) * cb(j) * cb(n - i - j);
                    }
                }
            }
        }
        total
    }

    #[test]
    fn f_weight_examples() {
        assert_eq!(f_weight(2, 1).unwrap(), BigUint::from(6u32));
        assert_eq!(f_weight(1, 3).unwrap(), BigUint::from(6u32));
        assert_eq!(f_weight(2, 3).unwrap(), BigUint::from(30u32));
    }

    #[test]
    fn f_weight_matches_enumeration() {
        for dim in 1..=3 {
            for n in 0..=8 {
                assert_eq!(f_weight(n, dim).unwrap(), BigUint::from(brute_force(n, dim)), "n={n} d={dim}");
            }
        }
    }

    #[test]
    fn f_weight_matches_generating_function() {
        // (1-4z)^{-d/2}: a_n = a_{n-1} · 2(2n + d - 2) / n, exactly.
        for dim in 1..=3u32 {
            let mut a = BigUint::one();
            for n in 0..20usize {
                if n > 0 {
                    a = a * BigUint::from(2 * (2 * n + dim as usize - 2)) / BigUint::from(n);
                }
                assert_eq!(f_weight(n, dim).unwrap(), a, "n={n} d={dim}");
            }
        }
    }

    #[test]
    fn f_weight_guard() {
        assert!(matches!(f_weight(MAX_SERIES_TERMS + 1, 1), Err(Error::GuardExceeded { .. })));
        assert!(f_weight(3, 4).is_err());
    }

    #[test]
    fn squeezing_examples() {
        assert_eq!(squeezing_parameter(2.0, 2.0), 0.0);
        assert!((squeezing_parameter(std::f64::consts::E * 0.3, 0.3) - 1.0).abs() < 1e-15);
        assert_eq!(squeezing_parameter(0.2, 0.7), -squeezing_parameter(0.7, 0.2));
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap_coeff_sq(ModeIndex([0, 0, 0]), 0.0, 3), 1.0);
        assert_eq!(overlap_coeff_sq(ModeIndex([1, 0, 2]), 0.0, 3), 0.0);
        // Σ c² over all even modes is 1.
        let r = 0.8_f64;
        for dim in 1..=3u32 {
            let mut total = 0.0;
            let range = 0..160u32;
            match dim {
                1 => {
                    for a in range {
                        total += overlap_coeff_sq(ModeIndex([a, 0, 0]), r, 1);
                    }
                }
                2 => {
                    for a in range.clone() {
                        for b in 0..160 - a {
                            total += overlap_coeff_sq(ModeIndex([a, b, 0]), r, 2);
                        }
                    }
                }
                _ => {
                    for a in 0..70u32 {
                        for b in 0..70 - a {
                            for c in 0..70 - a - b {
                                total += overlap_coeff_sq(ModeIndex([a, b, c]), r, 3);
                            }
                        }
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-10, "dim {dim}: {total}");
        }
    }

    #[test]
    fn pure_at_matched_width() {
        for dim in 1..=3 {
            let res = symplectic_eigenvalue(&spec(1.0, dim)).unwrap();
            assert!((res.nu - 1.0).abs() < 1e-12);
            assert!((res.nu.powi(2) - 4.0 * res.qq_var * res.pp_var).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_in_squeezing() {
        for dim in 1..=3 {
            let a = symplectic_eigenvalue(&spec(2.0, dim)).unwrap().nu;
            let b = symplectic_eigenvalue(&spec(0.5, dim)).unwrap().nu;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn mixedness_grows_with_dimension() {
        for ratio in [0.1, 0.2, 0.6, 1.7, 4.0, 10.0] {
            let nus: Vec<f64> = (1..=3).map(|d| symplectic_eigenvalue(&spec(ratio, d)).unwrap().nu).collect();
            assert!(nus[0] < nus[1] && nus[1] < nus[2], "{ratio}: {nus:?}");
            assert!(nus[0] > 1.0);
        }
    }

    #[test]
    fn completeness_within_tolerance() {
        for ratio in [0.1, 0.5, 3.0, 10.0] {
            let s = PuritySpec {
                series_rel_tol: 1e-10,
                ..spec(ratio, 3)
            };
            let res = symplectic_eigenvalue(&s).unwrap();
            assert!(res.completeness <= 1.0 + 1e-12 && res.completeness >= 1.0 - 1e-9, "{}", res.completeness);
        }
    }

    #[test]
    fn interval_is_symmetric_and_ordered() {
        let widths: Vec<(f64, f64)> = (1..=3).map(|d| purity_interval(10.0, d, 0.05, 1e-13).unwrap()).collect();
        for (lo, hi) in &widths {
            assert!((lo * hi - 1.0).abs() < 1e-12);
        }
        // Every dimension stays within 5% of purity across a full decade.
        for (_, hi) in &widths {
            assert!(*hi > 10.0, "{widths:?}");
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(symplectic_eigenvalue(&spec(-1.0, 1)).is_err());
        assert!(symplectic_eigenvalue(&spec(1.0, 0)).is_err());
    }
}
