#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcost_core::{Density, MetricMeasureSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability vector with entries bounded away from zero.
pub fn weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// `n` uniform points in the unit square with Euclidean distances.
pub fn planar_dist(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    pts.iter()
        .map(|a| pts.iter().map(|b| (a.0 - b.0).hypot(a.1 - b.1)).collect())
        .collect()
}

pub fn planar_space(seed: u64, n: usize) -> MetricMeasureSpace {
    let mut r = rng(seed);
    let dist = planar_dist(&mut r, n);
    let mu = weights(&mut r, n);
    MetricMeasureSpace::from_matrix(dist, mu, None).unwrap()
}

/// A density with random positive weights, optionally zeroed on some points.
pub fn random_density(space: &MetricMeasureSpace, seed: u64, sparse: bool) -> Density {
    let mut r = rng(seed);
    let n = space.n();
    let mut h: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..1.0f64).powi(3) * 4.0).collect();
    if sparse {
        for x in h.iter_mut() {
            if r.gen::<f64>() < 0.3 {
                *x = 0.0;
            }
        }
    }
    if h.iter().all(|&x| x == 0.0) {
        h[0] = 1.0;
    }
    Density::normalized(space, h).unwrap()
}

/// Densities drawn from all three family kinds, round-robin.
pub fn mixed_family(space: &MetricMeasureSpace, seed: u64, size: usize) -> Vec<Density> {
    use tcost_core::family::sample_member;
    use tcost_core::{DensityFamily, FamilyKind};
    let kinds = [FamilyKind::ExponentialTilt, FamilyKind::Truncation, FamilyKind::IndicatorMixture];
    (0..size)
        .map(|k| {
            let spec = DensityFamily::new(kinds[k % 3], seed, size);
            sample_member(space, &spec, k).unwrap()
        })
        .collect()
}

/// Relative entropy by the plain definition `Σ μ h log h`.
pub fn entropy_oracle(mu: &[f64], h: &[f64]) -> f64 {
    mu.iter()
        .zip(h)
        .filter(|(_, x)| **x > 0.0)
        .map(|(m, x)| m * x * x.ln())
        .sum()
}
