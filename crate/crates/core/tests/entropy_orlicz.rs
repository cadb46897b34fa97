mod common;

use common::{entropy_oracle, mixed_family, planar_space, random_density, rng, weights};
use proptest::prelude::*;
use rand::Rng;
use tcost_core::entropy::{
    exp_integral, h_log_plus, h_log_plus_check, large_entropy_bound, relative_entropy, transport_entropy_ratio,
};
use tcost_core::orlicz::{gauge_norm, holder_orlicz_check, lift_first, young_slack, Reference, YoungFunction};
use tcost_core::{gaussian_grid, Density, MetricMeasureSpace};

const E: f64 = std::f64::consts::E;

#[test]
fn young_inequality_on_a_grid() {
    let steps = 400;
    for a in 0..=steps {
        for b in 0..=steps {
            let (u, v) = (10.0 * a as f64 / steps as f64, 10.0 * b as f64 / steps as f64);
            assert!(young_slack(u, v) >= -1e-12, "u={u} v={v}");
        }
    }
}

#[test]
fn young_equality_case() {
    // τ(e) = e, τ*(2) = e, so τ(e) + τ*(2) = 2e = e·2
    assert!((YoungFunction::Tau.eval(E) - E).abs() < 1e-15);
    assert!((YoungFunction::TauStar.eval(2.0) - E).abs() < 1e-15);
    assert!(young_slack(E, 2.0).abs() < 1e-15);
}

#[test]
fn young_functions_join_continuously() {
    let below = YoungFunction::TauStar.eval(1.0 - 1e-12);
    let above = YoungFunction::TauStar.eval(1.0);
    assert!((below - above).abs() < 1e-11);
    assert!(YoungFunction::Tau.eval(1.0 + 1e-12) < 1e-11);
}

#[test]
fn entropy_of_two_point_example() {
    let s = MetricMeasureSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.5], None).unwrap();
    let nu = Density::normalized(&s, vec![1.5, 0.5]).unwrap();
    let direct = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
    assert!((relative_entropy(&s, &nu) - direct).abs() < 1e-15);
}

#[test]
fn gaussian_exponential_integral_matches_independent_sum() {
    let s = gaussian_grid(-6.0, 6.0, 241).unwrap();
    let x0 = s.coords().unwrap()[s.x0()];
    // independent summation: raw Boltzmann weights, normalized at the end
    let dx = 12.0 / 240.0;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..241 {
        let x = -6.0 + dx * i as f64;
        let w = (-0.5 * x * x).exp();
        num += w * (0.25 * (x - x0) * (x - x0)).exp();
        den += w;
    }
    let got = exp_integral(&s, 0.25, 2.0).unwrap();
    assert!((got - num / den).abs() <= 1e-6 * got);
    // continuum value ∫ e^{x²/4} dγ = √2
    assert!((got - 2f64.sqrt()).abs() < 1e-3);
}

#[test]
fn gauge_norm_of_constants() {
    let mu = [0.2, 0.3, 0.5];
    for c in [1e-3, 0.4, 1.0, 7.5] {
        let n = gauge_norm(&[c; 3], YoungFunction::TauStar, Reference::Measure(&mu)).unwrap();
        assert!((n.value - c).abs() <= 1e-10 * c);
    }
    assert_eq!(gauge_norm(&[0.0; 3], YoungFunction::Tau, Reference::Measure(&mu)).unwrap().value, 0.0);
}

#[test]
fn gaussian_transport_entropy_ratio_stays_bounded_for_small_tilts() {
    let s = gaussian_grid(-6.0, 6.0, 241).unwrap();
    let coords = s.coords().unwrap().to_vec();
    for k in 1..=6 {
        let theta = 10f64.powi(-k);
        let h: Vec<f64> = coords.iter().map(|x| (theta * x).exp()).collect();
        let nu = Density::normalized(&s, h).unwrap();
        let r = transport_entropy_ratio(&s, &nu, 2.0).unwrap();
        // continuum value θ/(θ/2 + 1/√2); on the grid W₂² cannot drop below
        // about θ Δx, so the ratio levels off near √2 Δx instead of vanishing
        assert!(r.is_finite() && r <= 0.15, "theta {theta}: {r}");
    }
    let far = Density::point_mass(&s, 230).unwrap();
    assert!(transport_entropy_ratio(&s, &far, 2.0).unwrap().is_finite());
}

#[test]
fn large_entropy_bound_holds_on_a_diameter_two_space() {
    // planar points scaled into a disc of diameter at most 2
    for seed in 0..20 {
        let s = planar_space(seed, 25);
        let family = mixed_family(&s, seed, 30);
        for (k, nu) in family.iter().enumerate() {
            for p in [1.0, 2.0] {
                let b = large_entropy_bound(&s, nu, p).unwrap();
                if b.report.in_domain {
                    assert!(b.holds(), "seed {seed} member {k}: {:?}", b.report);
                    assert!(b.intermediate.margin >= -1e-12);
                }
            }
        }
        let atom = Density::point_mass(&s, 0).unwrap();
        let b = large_entropy_bound(&s, &atom, 2.0).unwrap();
        assert!(b.report.in_domain && b.holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn entropy_is_nonnegative_and_matches_the_definition(seed in any::<u64>(), n in 1usize..40) {
        let s = planar_space(seed, n);
        let nu = random_density(&s, seed ^ 11, true);
        let h = relative_entropy(&s, &nu);
        prop_assert!(h >= 0.0);
        prop_assert!((h - entropy_oracle(s.mu(), nu.h())).abs() <= 1e-12 * h.max(1.0));
        prop_assert_eq!(relative_entropy(&s, &Density::uniform(n)), 0.0);
    }

    #[test]
    fn gauge_norm_solves_its_defining_equation(seed in any::<u64>(), n in 1usize..30, product in any::<bool>(), tau in any::<bool>()) {
        let mut r = rng(seed);
        let mu = weights(&mut r, n);
        let len = if product { n * n } else { n };
        let scale = 10f64.powf(r.gen_range(-3.0..3.0));
        let g: Vec<f64> = (0..len).map(|_| scale * r.gen_range(0.0..1.0f64).powi(2)).collect();
        let psi = if tau { YoungFunction::Tau } else { YoungFunction::TauStar };
        let reference = if product { Reference::Product(&mu) } else { Reference::Measure(&mu) };
        let norm = gauge_norm(&g, psi, reference).unwrap().value;
        let at = reference.integrate(&g, |x| psi.eval(x / norm));
        prop_assert!((at - 1.0).abs() <= 1e-8, "∫ψ(g/N) = {at}");
        prop_assert!(norm <= reference.integrate(&g, |x| psi.eval(x)).max(1.0) * (1.0 + 1e-15));
    }

    #[test]
    fn holder_orlicz_pairs(seed in any::<u64>(), n in 1usize..20) {
        let mut r = rng(seed);
        let mu = weights(&mut r, n);
        let f: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..5.0)).collect();
        let g: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..5.0)).collect();
        let c = holder_orlicz_check(&f, &g, Reference::Measure(&mu)).unwrap();
        prop_assert!(c.margin >= -1e-10);
    }

    #[test]
    fn holder_orlicz_density_against_squared_distance(seed in any::<u64>(), n in 2usize..15) {
        let s = planar_space(seed, n);
        let nu = random_density(&s, seed ^ 3, true);
        let c = holder_orlicz_check(&lift_first(nu.h()), &s.cost_matrix(2.0), Reference::Product(s.mu())).unwrap();
        prop_assert!(c.margin >= -1e-10);
    }

    #[test]
    fn h_log_plus_is_bounded_by_entropy(seed in any::<u64>(), n in 1usize..40) {
        let s = planar_space(seed, n);
        let nu = random_density(&s, seed ^ 13, true);
        let rep = h_log_plus_check(&s, &nu);
        prop_assert!(rep.margin >= -1e-12);
        prop_assert!(h_log_plus(&s, &nu) >= 0.0);
    }
}
