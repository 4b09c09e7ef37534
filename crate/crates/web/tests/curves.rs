use harvest_web::{negativity_points, profile_points, purity_points};

fn pairs(flat: &[f64]) -> Vec<(f64, f64)> {
    flat.chunks(2).map(|c| (c[0], c[1])).collect()
}

#[test]
fn purity_curve_is_pure_at_matched_width() {
    let curve = pairs(&purity_points(10.0, 3, 0.1, 10.0, 41).unwrap());
    assert_eq!(curve.len(), 41);
    let (r, nu) = curve[20];
    assert!((r - 1.0).abs() < 1e-12 && (nu - 1.0).abs() < 1e-12);
    assert!(curve.iter().all(|&(_, nu)| nu >= 1.0 - 1e-12));
}

#[test]
fn negativity_curve_has_a_threshold() {
    let curve = pairs(&negativity_points(0.1, 5.0, 0.0, 8.0, 16).unwrap());
    assert_eq!(curve[0].1, 0.0);
    assert!(curve.iter().any(|&(_, n)| n > 0.0));
    assert!(curve.iter().all(|&(_, n)| n.is_finite() && n >= 0.0));
}

#[test]
fn profiles_are_normalised_on_the_sampled_grid() {
    for (kind, m) in [("harmonic", 0), ("harmonic", 3), ("box", 1), ("box", 4)] {
        let p = pairs(&profile_points(kind, 0.5, m, 4001).unwrap());
        let h = p[1].0 - p[0].0;
        let norm: f64 = p.iter().map(|&(_, f)| f * f * h).sum();
        assert!((norm - 1.0).abs() < 1e-3, "{kind} {m}: {norm}");
    }
}

#[test]
fn bad_arguments_are_reported() {
    assert!(profile_points("ring", 1.0, 0, 10).is_err());
    assert!(profile_points("box", 1.0, 0, 10).is_err());
    assert!(purity_points(1.0, 2, 2.0, 1.0, 10).is_err());
    assert!(negativity_points(0.1, 5.0, 0.0, 8.0, 1).is_err());
}
