mod common;

use common::{brute_local, brute_nonlocal, pinned_points, switching_transform_sq, time_ordered_kernel};
use harvest_core::harvesting::harvest;
use harvest_core::kernels::QuadratureSettings;
use std::f64::consts::PI;

#[test]
fn brute_force_time_integrals_match_closed_forms() {
    // |χ̃(ν)|² = 2 e^{-ν²/π} for the unit Gaussian switching.
    for nu in [0.0, 1.0, 3.5, 9.0] {
        let exact = 2.0 * (-nu * nu / PI).exp();
        assert!((switching_transform_sq(nu) - exact).abs() <= 1e-10 * exact + 1e-15, "nu = {nu}");
    }
    // At ω = 0 the kernel factorizes into χ̃(-Ω)².
    let v = time_ordered_kernel(2.0, 0.0);
    let exact = switching_transform_sq(2.0);
    assert!((v.re - exact).abs() < 1e-12 && v.im.abs() < 1e-12);
}

#[test]
fn dimension_reduced_scalars_match_nested_quadrature() {
    for (name, geom, gap) in pinned_points() {
        let (a, b, field) = geom.detectors(gap);
        let r = harvest(&a, &b, &field, &QuadratureSettings::default()).unwrap();
        let l_ref = brute_local(&geom, gap);
        let m_ref = brute_nonlocal(&geom, gap);
        let l_err = (r.l_aa - l_ref).abs() / l_ref;
        let m_err = (r.m - m_ref).norm() / m_ref.norm();
        assert!(l_err < 1e-4, "{name}: L_AA {} vs {l_ref} (rel {l_err:.2e})", r.l_aa);
        assert!(m_err < 1e-4, "{name}: M {} vs {m_ref} (rel {m_err:.2e})", r.m);
    }
}
