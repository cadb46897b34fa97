mod common;

use proptest::prelude::*;
use tcost_core::entropy::relative_entropy;
use tcost_core::{
    build_grid_space, gaussian_grid, sample_family, validate_density, DensityFamily, FamilyKind, MetricMeasureSpace,
};

#[test]
fn gaussian_grid_moments() {
    let s = gaussian_grid(-6.0, 6.0, 241).unwrap();
    assert!((s.mu().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    // midpoint-rule oracle against the exact moments 1 and 3
    let x = s.coords().unwrap();
    let m2: f64 = x.iter().zip(s.mu()).map(|(x, m)| m * x * x).sum();
    let m4: f64 = x.iter().zip(s.mu()).map(|(x, m)| m * x.powi(4)).sum();
    assert!((m2 - 1.0).abs() < 0.01);
    assert!((m4 - 3.0).abs() < 0.03);
    assert_eq!(x[s.x0()], 0.0);
    let d2 = s.dist_to_base_pow(2.0);
    assert!((s.integrate(&d2) - m2).abs() < 1e-15);
}

#[test]
fn two_node_flat_grid() {
    let s = build_grid_space(-1.5, 2.0, 2, &[0.0, 0.0]).unwrap();
    assert_eq!(s.mu(), &[0.5, 0.5]);
    assert_eq!(s.dist(0, 1), 3.5);
    assert!(build_grid_space(0.0, 1.0, 3, &[0.0, f64::INFINITY, 0.0]).is_err());
    assert!(build_grid_space(0.0, 1.0, 1, &[0.0]).is_err());
}

#[test]
fn density_validation_examples() {
    let s = MetricMeasureSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.5], None).unwrap();
    assert!(validate_density(&s, vec![1.0, 1.0]).is_ok());
    assert!(validate_density(&s, vec![2.0, 0.0]).is_ok());
    assert!(validate_density(&s, vec![2.0, 0.1]).is_err());
    assert!(validate_density(&s, vec![2.5, -0.5]).is_err());
    assert!(validate_density(&s, vec![1.0]).is_err());
}

#[test]
fn metric_axioms_are_enforced() {
    let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
    assert!(MetricMeasureSpace::from_matrix(asym, vec![0.5, 0.5], None).is_err());
    let triangle = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
    assert!(MetricMeasureSpace::from_matrix(triangle, vec![0.2, 0.3, 0.5], None).is_err());
    let ok = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
    assert!(MetricMeasureSpace::from_matrix(ok.clone(), vec![0.5, 0.6], None).is_err());
    assert!(MetricMeasureSpace::from_matrix(ok, vec![1.0, 0.0], None).is_ok());
}

#[test]
fn vanishing_tilt_gives_the_reference_measure() {
    let s = gaussian_grid(-6.0, 6.0, 241).unwrap();
    let spec = DensityFamily::new(FamilyKind::ExponentialTilt, 3, 20).with_scales(1e-9, 1e-9);
    for nu in sample_family(&s, &spec).unwrap() {
        assert!(nu.h().iter().all(|x| (x - 1.0).abs() < 1e-7));
        assert!(relative_entropy(&s, &nu) < 1e-13);
    }
}

#[test]
fn tilt_family_spans_entropy_decades() {
    let s = gaussian_grid(-6.0, 6.0, 241).unwrap();
    let fam = sample_family(&s, &DensityFamily::new(FamilyKind::ExponentialTilt, 7, 300)).unwrap();
    let hs: Vec<f64> = fam.iter().map(|nu| relative_entropy(&s, nu)).collect();
    let lo = hs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = hs.iter().cloned().fold(0.0, f64::max);
    assert!(lo < 1e-5 && hi > 1.0, "entropy range [{lo}, {hi}]");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn families_are_reproducible(seed in any::<u64>(), kind in 0usize..3) {
        let s = common::planar_space(seed, 15);
        let kind = [FamilyKind::ExponentialTilt, FamilyKind::Truncation, FamilyKind::IndicatorMixture][kind];
        let spec = DensityFamily::new(kind, seed, 25);
        let a = sample_family(&s, &spec).unwrap();
        let b = sample_family(&s, &spec).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(x.h().iter().zip(y.h()).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }

    #[test]
    fn truncation_family_respects_its_levels(seed in any::<u64>()) {
        let s = gaussian_grid(-5.0, 5.0, 101).unwrap();
        let spec = DensityFamily::new(FamilyKind::Truncation, seed, 30).with_cut_levels(vec![1.5, 3.0]);
        for nu in sample_family(&s, &spec).unwrap() {
            prop_assert!(nu.sup(&s) <= 3.0 * (1.0 + 1e-12));
            prop_assert!((s.integrate(nu.h()) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn triangle_inequality_on_constructed_spaces(seed in any::<u64>(), n in 2usize..25) {
        let s = common::planar_space(seed, n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    prop_assert!(s.dist(i, k) <= s.dist(i, j) + s.dist(j, k) + 1e-12);
                }
            }
        }
    }
}
