use super::*;
use crate::kernels::QuadratureMethod;
use crate::modes::{ModeIndex, PotentialSpec};
use crate::smearing::SwitchingSpec;

fn gaussian(ell: f64, center: [f64; 3]) -> DetectorSpec {
    DetectorSpec {
        potential: PotentialSpec::harmonic(ell, 0.0, center),
        mode: ModeIndex([0, 0, 0]),
        switching: SwitchingSpec::new(1.0),
        coupling: 1.0,
        gap: Some(3.0),
    }
}

fn cube(center: [f64; 3]) -> DetectorSpec {
    DetectorSpec {
        potential: PotentialSpec::cube(0.5, 0.0, center),
        mode: ModeIndex([1, 1, 1]),
        switching: SwitchingSpec::new(1.0),
        coupling: 1.0,
        gap: Some(3.0),
    }
}

fn loose() -> QuadratureSettings {
    QuadratureSettings {
        rel_tol: 1e-6,
        ..QuadratureSettings::default()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sample_result() -> HarvestingResult {
    HarvestingResult::from_scalars(0.02, 0.015, c(0.004, -0.002), c(0.01, 0.03), c(-0.02, 0.005), c(0.012, 0.021)).unwrap()
}

#[test]
fn rho_of_zero_scalars_is_vacuum_projector() {
    let r = HarvestingResult::from_scalars(0.0, 0.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    let rho = assemble_rho(&r).unwrap();
    for i in 0..PAIR_DIM {
        for j in 0..PAIR_DIM {
            let expected = if i == 0 && j == 0 { 1.0 } else { 0.0 };
            assert_eq!(rho.matrix[(i, j)], c(expected, 0.0));
        }
    }
    assert_eq!(negativity_from_rho(&rho), 0.0);
}

#[test]
fn rho_layout() {
    let r = sample_result();
    let rho = assemble_rho(&r).unwrap().matrix;
    assert_eq!(rho[(basis_index(1, 1), basis_index(0, 0))], r.m);
    assert_eq!(rho[(basis_index(0, 0), basis_index(1, 1))], r.m.conj());
    assert_eq!(rho[(basis_index(0, 1), basis_index(1, 0))], r.l_ab.conj());
    assert_eq!(rho[(basis_index(0, 0), basis_index(0, 2))], r.k_b.conj());
    assert_eq!(rho[(basis_index(0, 0), basis_index(2, 0))], r.k_a.conj());
    assert_eq!(rho[(basis_index(1, 0), basis_index(1, 0))].re, r.l_aa);
    assert_eq!(rho[(basis_index(0, 1), basis_index(0, 1))].re, r.l_bb);
    let trace: Complex64 = (0..PAIR_DIM).map(|i| rho[(i, i)]).sum();
    assert!((trace - c(1.0, 0.0)).norm() < 1e-15);
    assert_eq!(rho, rho.adjoint());
    for &row in &[basis_index(1, 2), basis_index(2, 1), basis_index(2, 2)] {
        for col in 0..PAIR_DIM {
            assert_eq!(rho[(row, col)], c(0.0, 0.0));
        }
    }
}

#[test]
fn rho_rejects_non_finite() {
    let mut r = sample_result();
    r.m = c(f64::NAN, 0.0);
    assert!(matches!(assemble_rho(&r), Err(Error::InconsistentInput(_))));
}

#[test]
fn closed_negativity_examples() {
    let n = negativity_closed(0.01, 0.01, c(0.0, 0.03)).unwrap();
    assert!((n - 0.02).abs() < 1e-16);
    assert_eq!(negativity_closed(0.05, 0.01, c(0.0, 0.0)).unwrap(), 0.0);
    assert_eq!(negativity_closed(0.03, 0.03, c(0.01, 0.0)).unwrap(), 0.0);
    let n = negativity_closed(0.02, 0.01, c(0.05, 0.0)).unwrap();
    assert!((n - (0.002525_f64.sqrt() - 0.015)).abs() < 1e-15);
    assert!(matches!(negativity_closed(-0.1, 0.0, c(0.0, 0.0)), Err(Error::Domain(_))));
}

#[test]
fn closed_negativity_is_block_eigenvalue() {
    let (la, lb, m) = (0.02, 0.007, c(0.01, -0.013));
    let block = nalgebra::Matrix2::new(c(lb, 0.0), m.conj(), m, c(la, 0.0));
    let low = block.symmetric_eigenvalues().min();
    assert!((negativity_closed(la, lb, m).unwrap() - (-low).max(0.0)).abs() < 1e-16);
}

#[test]
fn spectral_negativity_is_symmetric_and_second_order_close() {
    let r = sample_result();
    let a = negativity_from_rho(&assemble_rho(&r).unwrap());
    let b = negativity_from_rho(&assemble_rho(&r.swapped()).unwrap());
    assert!((a - b).abs() < 1e-15);
    let scale: f64 = [r.l_aa, r.l_bb, r.l_ab.norm(), r.k_a.norm(), r.k_b.norm(), r.m.norm()]
        .into_iter()
        .fold(0.0, f64::max);
    assert!((a - r.negativity).abs() <= 10.0 * scale * scale);
}

#[test]
fn self_term_equals_minus_coincident_nonlocal() {
    let f = TargetFieldSpec::massless();
    let q = QuadratureSettings::default();
    let d = gaussian(0.1, [0.3, -0.2, 1.0]);
    let k = compute_k(&d, &f, &q).unwrap();
    let m = compute_m(&d, &d, &f, &q).unwrap();
    assert!((k + m).norm() <= 1e-7 * k.norm(), "K={k} M={m}");
}

#[test]
fn local_terms_are_real_and_positive_semidefinite() {
    let f = TargetFieldSpec { mass: 0.4, ..TargetFieldSpec::massless() };
    let q = QuadratureSettings::default();
    for sep in [0.0, 0.3, 2.0, 5.0] {
        let a = gaussian(0.2, [0.0; 3]);
        let b = DetectorSpec { coupling: 0.7, ..gaussian(0.35, [sep, 0.0, 0.0]) };
        let r = harvest(&a, &b, &f, &q).unwrap();
        assert!(r.l_aa > 0.0 && r.l_bb > 0.0);
        assert!(r.l_ab.norm_sqr() <= r.l_aa * r.l_bb * (1.0 + 1e-12), "sep={sep}");
        let laa = compute_l(&a, &a, &f, &q).unwrap();
        assert_eq!(laa.im, 0.0);
        assert!((laa.re - r.l_aa).abs() <= 1e-7 * r.l_aa);
    }
}

#[test]
fn vanishing_switching_time_kills_all_terms() {
    let f = TargetFieldSpec::massless();
    let q = QuadratureSettings::default();
    let with_t = |t: f64, x: f64| DetectorSpec {
        switching: SwitchingSpec::new(t),
        ..gaussian(0.1, [x, 0.0, 0.0])
    };
    // Once T is far below every other scale, each term scales like T².
    let r1 = harvest(&with_t(1e-3, 0.0), &with_t(1e-3, 1.0), &f, &q).unwrap();
    let r2 = harvest(&with_t(1e-4, 0.0), &with_t(1e-4, 1.0), &f, &q).unwrap();
    assert!(r2.l_aa < 0.02 * r1.l_aa, "{} {}", r2.l_aa, r1.l_aa);
    assert!(r2.k_a.norm() < 0.02 * r1.k_a.norm());
    assert!(r2.m.norm() < 0.02 * r1.m.norm());
}

#[test]
fn translation_invariance() {
    let f = TargetFieldSpec::massless();
    let q = QuadratureSettings::default();
    let shift = [0.7, -1.3, 2.2];
    let a = gaussian(0.1, [0.0; 3]);
    let b = gaussian(0.1, [0.0, 2.0, 0.0]);
    let moved = |d: &DetectorSpec| {
        let c = d.potential.center;
        d.moved_to([c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]])
    };
    let r1 = harvest(&a, &b, &f, &q).unwrap();
    let r2 = harvest(&moved(&a), &moved(&b), &f, &q).unwrap();
    assert!((r1.m - r2.m).norm() <= 1e-7 * r1.m.norm());
    assert!((r1.l_ab - r2.l_ab).norm() <= 1e-7 * r1.l_aa);
    assert!((r1.l_aa - r2.l_aa).abs() <= 1e-7 * r1.l_aa);
}

#[test]
fn translation_invariance_of_boxes() {
    let f = TargetFieldSpec::massless();
    let q = loose();
    let a = cube([0.0; 3]);
    let b = cube([0.0, 0.0, 1.5]);
    let m1 = compute_m(&a, &b, &f, &q).unwrap();
    let m2 = compute_m(&a.moved_to([1.0, 2.0, 3.0]), &b.moved_to([1.0, 2.0, 4.5]), &f, &q).unwrap();
    assert!((m1 - m2).norm() <= 1e-6 * m1.norm(), "{m1} vs {m2}");
}

#[test]
fn spherical_reduction_matches_directional_path() {
    let f = TargetFieldSpec::massless();
    let q = QuadratureSettings::default();
    let full = QuadratureSettings { force_full_3d: true, ..q };
    for (ell, sep) in [(0.1, [5.0, 0.0, 0.0]), (0.3, [0.0, 1.2, 0.0]), (0.2, [0.8, 0.6, 0.4])] {
        let a = gaussian(ell, [0.0; 3]);
        let b = gaussian(ell, sep);
        for term in [Term::LocalAB, Term::NonLocal] {
            let x = PairIntegrator::new(&a, &b, &f, &q).unwrap().term(term, None).unwrap().value;
            let y = PairIntegrator::new(&a, &b, &f, &full).unwrap().term(term, None).unwrap().value;
            assert!((x - y).norm() <= 1e-4 * x.norm(), "{term:?} sep={sep:?}: {x} vs {y}");
        }
    }
}

#[test]
fn nonlocal_term_decays_with_distance() {
    let f = TargetFieldSpec::massless();
    let q = QuadratureSettings::default();
    let a = gaussian(0.1, [0.0; 3]);
    let mut last = f64::INFINITY;
    for sep in [4.0, 6.0, 8.0, 12.0, 16.0] {
        let m = compute_m(&a, &gaussian(0.1, [sep, 0.0, 0.0]), &f, &q).unwrap().norm();
        assert!(m < last, "sep={sep}");
        last = m;
    }
}

#[test]
fn communication_small_when_spacelike_and_grows_when_close() {
    let f = TargetFieldSpec::massless();
    let q = QuadratureSettings::default();
    let a = gaussian(0.1, [0.0; 3]);
    let far = harvest(&a, &gaussian(0.1, [5.0, 0.0, 0.0]), &f, &q).unwrap();
    assert!(far.comm_ratio < 1e-5, "{}", far.comm_ratio);
    let mut last = 0.0;
    for sep in [0.9, 0.6, 0.4, 0.2] {
        let c = communication_estimate(&a, &gaussian(0.1, [sep, 0.0, 0.0]), &f, &q).unwrap();
        assert!(c > last, "sep={sep}: {c}");
        last = c;
    }
}

#[test]
fn mismatched_gaps_and_switchings_are_rejected() {
    let f = TargetFieldSpec::massless();
    let q = QuadratureSettings::default();
    let a = gaussian(0.1, [0.0; 3]);
    let b = DetectorSpec { gap: Some(2.0), ..gaussian(0.1, [3.0, 0.0, 0.0]) };
    assert!(matches!(compute_m(&a, &b, &f, &q), Err(Error::GapMismatch(_, _))));
    assert!(matches!(compute_l(&a, &b, &f, &q), Err(Error::GapMismatch(_, _))));
    let b = DetectorSpec {
        switching: SwitchingSpec::new(2.0),
        ..gaussian(0.1, [3.0, 0.0, 0.0])
    };
    assert!(matches!(compute_m(&a, &b, &f, &q), Err(Error::SwitchingMismatch(_, _))));
    // Single-detector terms do not need matching gaps.
    assert!(compute_k(&b, &f, &q).is_ok());
}

#[test]
fn unreachable_tolerance_is_reported() {
    let f = TargetFieldSpec::massless();
    let q = QuadratureSettings {
        method: QuadratureMethod::MonteCarlo { seed: 3, samples: 64 },
        force_full_3d: true,
        ..QuadratureSettings::default()
    };
    let r = compute_m(&cube([0.0; 3]), &cube([0.9, 0.4, 0.0]), &f, &q);
    assert!(matches!(r, Err(Error::ToleranceNotMet { .. })), "{r:?}");
}

#[test]
fn gap_sweeps_reuse_cached_columns() {
    let f = TargetFieldSpec::massless();
    let q = QuadratureSettings::default();
    let a = gaussian(0.1, [0.0; 3]);
    let b = gaussian(0.1, [5.0, 0.0, 0.0]);
    let mut p = PairIntegrator::new(&a, &b, &f, &q).unwrap();
    for gap in [0.5, 2.0, 7.5] {
        let swept = p.evaluate(Some(gap)).unwrap();
        let direct = harvest(&a.with_gap(gap), &b.with_gap(gap), &f, &q).unwrap();
        assert!((swept.m - direct.m).norm() <= 1e-7 * direct.m.norm());
        assert!((swept.l_aa - direct.l_aa).abs() <= 1e-7 * direct.l_aa);
    }
}

#[test]
fn radial_rules_agree() {
    let f = TargetFieldSpec { mass: 1.0, ..TargetFieldSpec::massless() };
    let gk = QuadratureSettings::default();
    let gl = QuadratureSettings {
        method: QuadratureMethod::TensorGl,
        ..gk
    };
    let a = gaussian(0.25, [0.0; 3]);
    let b = gaussian(0.25, [0.0, 0.0, 2.0]);
    let x = harvest(&a, &b, &f, &gk).unwrap();
    let y = harvest(&a, &b, &f, &gl).unwrap();
    assert!((x.m - y.m).norm() <= 1e-6 * x.m.norm());
    assert!((x.k_a - y.k_a).norm() <= 1e-6 * x.k_a.norm());
}
