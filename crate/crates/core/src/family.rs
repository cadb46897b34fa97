//! Seeded density populations over which suprema and violation counts are
//! taken.
//!
//! Every member is generated from its own ChaCha8 stream keyed by
//! `(seed, index)`, so a member does not depend on how many others were drawn
//! or in which order.

use alloc::format;
use alloc::vec::Vec;
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::space::{validate_density, Density, MetricMeasureSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `h ∝ exp(θ φ)` for a standardized direction `φ` and log-uniform `|θ|`.
    ExponentialTilt,
    /// A tilted density clipped at a cut level (`h ≤ a` everywhere).
    Truncation,
    /// `h = (1 - w) + w 1_A / μ(A)` for a random set `A`.
    IndicatorMixture,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::ExponentialTilt => "exponential-tilt",
            FamilyKind::Truncation => "truncation",
            FamilyKind::IndicatorMixture => "indicator-mixture",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "exponential-tilt" => Some(FamilyKind::ExponentialTilt),
            "truncation" => Some(FamilyKind::Truncation),
            "indicator-mixture" => Some(FamilyKind::IndicatorMixture),
            _ => None,
        }
    }
}

/// Which directions an exponential tilt may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TiltDirection {
    /// Random among coordinate, centered square, distance to a random anchor
    /// and (off the line) an i.i.d. uniform field.
    Mixed,
    /// Coordinate only (translations of a Gaussian on a Gaussian grid).
    /// Falls back to distance to a random anchor off the line.
    Coordinate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityFamily {
    pub seed: u64,
    pub kind: FamilyKind,
    pub size: usize,
    /// Smallest tilt `|θ|` (tilt/truncation) or mixture weight `w`.
    pub scale_min: f64,
    /// Largest tilt `|θ|` or mixture weight (clamped to 1 for mixtures).
    pub scale_max: f64,
    /// Cut levels for the truncation kind; ignored otherwise.
    pub cut_levels: Vec<f64>,
    pub direction: TiltDirection,
}

impl DensityFamily {
    pub fn new(kind: FamilyKind, seed: u64, size: usize) -> Self {
        Self {
            seed,
            kind,
            size,
            scale_min: 1e-3,
            scale_max: 2.5,
            cut_levels: alloc::vec![2.0, 4.0, 8.0],
            direction: TiltDirection::Mixed,
        }
    }

    pub fn with_scales(mut self, lo: f64, hi: f64) -> Self {
        self.scale_min = lo;
        self.scale_max = hi;
        self
    }

    pub fn with_cut_levels(mut self, levels: Vec<f64>) -> Self {
        self.cut_levels = levels;
        self
    }

    pub fn with_direction(mut self, direction: TiltDirection) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale_min > 0.0 && self.scale_min.is_finite()) {
            return Err(invalid("scale_min", "must be positive and finite"));
        }
        if !(self.scale_max >= self.scale_min && self.scale_max.is_finite()) {
            return Err(invalid("scale_max", "must be finite and ≥ scale_min"));
        }
        if self.kind == FamilyKind::Truncation {
            if self.cut_levels.is_empty() {
                return Err(invalid("cut_levels", "truncation needs at least one level"));
            }
            if let Some(a) = self.cut_levels.iter().find(|a| !(**a > 1.0 && a.is_finite())) {
                return Err(invalid("cut_levels", format!("level {a} must exceed 1")));
            }
        }
        Ok(())
    }
}

/// Generates `spec.size` densities on `space`.
pub fn sample_family(space: &MetricMeasureSpace, spec: &DensityFamily) -> Result<Vec<Density>> {
    spec.validate()?;
    (0..spec.size).map(|k| sample_member(space, spec, k)).collect()
}

/// Generates member `index` of the family alone.
pub fn sample_member(
    space: &MetricMeasureSpace,
    spec: &DensityFamily,
    index: usize,
) -> Result<Density> {
    let mut rng = member_rng(spec.seed, index as u64);
    match spec.kind {
        FamilyKind::ExponentialTilt => tilt(space, spec, &mut rng),
        FamilyKind::Truncation => {
            let base = tilt(space, spec, &mut rng)?;
            let a = spec.cut_levels[rng.gen_range(0..spec.cut_levels.len())];
            clip_density(space, &base, a)
        }
        FamilyKind::IndicatorMixture => indicator_mixture(space, spec, &mut rng),
    }
}

fn member_rng(seed: u64, index: u64) -> ChaCha8Rng {
    // splitmix64 finalizer over (seed, index)
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let u: f64 = rng.gen();
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

fn pick_support_point(space: &MetricMeasureSpace, rng: &mut ChaCha8Rng) -> usize {
    let support = space.support();
    support[rng.gen_range(0..support.len())]
}

fn tilt(space: &MetricMeasureSpace, spec: &DensityFamily, rng: &mut ChaCha8Rng) -> Result<Density> {
    let n = space.n();
    let on_line = space.coords().is_some();
    let choice: u32 = match (spec.direction, on_line) {
        (TiltDirection::Coordinate, true) => 0,
        (TiltDirection::Coordinate, false) => 2,
        (TiltDirection::Mixed, true) => rng.gen_range(0..3),
        (TiltDirection::Mixed, false) => rng.gen_range(2..4),
    };
    let mut phi: Vec<f64> = match choice {
        0 => space.coords().map(|c| c.to_vec()).unwrap_or_default(),
        1 => space
            .coords()
            .map(|c| c.iter().map(|x| x * x).collect())
            .unwrap_or_default(),
        2 => {
            let k = pick_support_point(space, rng);
            (0..n).map(|i| space.dist(i, k)).collect()
        }
        _ => (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    };
    // standardize under μ
    let mean = space.integrate(&phi);
    phi.iter_mut().for_each(|v| *v -= mean);
    let var = space.integrate(&phi.iter().map(|v| v * v).collect::<Vec<_>>());
    if var > 0.0 {
        let sd = var.sqrt();
        phi.iter_mut().for_each(|v| *v /= sd);
    }
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let theta = sign * log_uniform(rng, spec.scale_min, spec.scale_max);
    let top = phi
        .iter()
        .zip(space.mu())
        .filter(|(_, m)| **m > 0.0)
        .map(|(v, _)| theta * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let h: Vec<f64> = phi.iter().map(|v| (theta * v - top).exp()).collect();
    Density::normalized(space, h)
}

fn indicator_mixture(
    space: &MetricMeasureSpace,
    spec: &DensityFamily,
    rng: &mut ChaCha8Rng,
) -> Result<Density> {
    let n = space.n();
    let mut in_set = alloc::vec![false; n];
    if space.coords().is_some() {
        let max_len = (n / 4).max(1);
        let len = rng.gen_range(1..=max_len);
        let start = rng.gen_range(0..=(n - len));
        in_set[start..start + len].iter_mut().for_each(|b| *b = true);
    } else {
        let q: f64 = rng.gen_range(0.05..0.5);
        for b in in_set.iter_mut() {
            *b = rng.gen::<f64>() < q;
        }
    }
    let mass: f64 = (0..n).filter(|&i| in_set[i]).map(|i| space.mu()[i]).sum();
    if !(mass > 0.0) {
        // empty draw: fall back to a single atom of the support
        let k = pick_support_point(space, rng);
        in_set.iter_mut().for_each(|b| *b = false);
        in_set[k] = true;
    }
    let mass: f64 = (0..n).filter(|&i| in_set[i]).map(|i| space.mu()[i]).sum();
    let w = log_uniform(rng, spec.scale_min.min(1.0), spec.scale_max.min(1.0));
    let h: Vec<f64> = in_set
        .iter()
        .map(|&b| (1.0 - w) + if b { w / mass } else { 0.0 })
        .collect();
    Density::normalized(space, h)
}

/// Water-filling clip: `h' = min(λ h, a)` with `λ ≥ 1` chosen so that `h'`
/// has unit mass. Requires `a > 1`.
pub fn clip_density(space: &MetricMeasureSpace, nu: &Density, a: f64) -> Result<Density> {
    if !(a > 1.0) {
        return Err(invalid("a", format!("clip level {a} must exceed 1")));
    }
    let h = nu.h();
    let mu = space.mu();
    if nu.sup(space) <= a {
        return Ok(nu.clone());
    }
    let mut order: Vec<usize> = (0..h.len()).filter(|&i| mu[i] > 0.0 && h[i] > 0.0).collect();
    order.sort_by(|&i, &j| h[j].partial_cmp(&h[i]).unwrap().then(i.cmp(&j)));
    let total_pos: f64 = order.iter().map(|&i| mu[i]).sum();
    if a * total_pos < 1.0 {
        return Err(Error::InvalidDensity(format!(
            "cannot clip at {a}: support of h has μ-mass {total_pos}"
        )));
    }
    // clip the top k + 1 points; the rest scale by λ
    let mut tail = alloc::vec![0.0; order.len() + 1];
    for t in (0..order.len()).rev() {
        tail[t] = tail[t + 1] + h[order[t]] * mu[order[t]];
    }
    let mut clipped_mass = 0.0;
    for k in 0..order.len() {
        clipped_mass += mu[order[k]];
        let rest = tail[k + 1];
        let next = order.get(k + 1).map(|&j| h[j]).unwrap_or(0.0);
        let lambda = if rest > 0.0 {
            (1.0 - a * clipped_mass) / rest
        } else {
            0.0
        };
        if lambda * next <= a {
            let mut capped = alloc::vec![false; h.len()];
            order[..=k].iter().for_each(|&j| capped[j] = true);
            let out: Vec<f64> = (0..h.len())
                .map(|j| {
                    if capped[j] {
                        a
                    } else {
                        (lambda * h[j]).min(a)
                    }
                })
                .collect();
            // renormalization moves entries by an ulp at most; keep the cap exact
            let d = Density::normalized(space, out)?;
            let out: Vec<f64> = d.into_inner().into_iter().map(|v| v.min(a)).collect();
            return validate_density(space, out);
        }
    }
    Err(Error::InvalidDensity("clip level not reachable".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::gaussian_grid;

    #[test]
    fn zero_tilt_gives_reference() {
        let s = gaussian_grid(-6.0, 6.0, 61).unwrap();
        let fam = DensityFamily::new(FamilyKind::ExponentialTilt, 3, 20).with_scales(1e-12, 1e-12);
        for d in sample_family(&s, &fam).unwrap() {
            assert!(d.is_reference(&s, 1e-9));
        }
    }

    #[test]
    fn same_seed_same_bits() {
        let s = gaussian_grid(-4.0, 4.0, 81).unwrap();
        for kind in [
            FamilyKind::ExponentialTilt,
            FamilyKind::Truncation,
            FamilyKind::IndicatorMixture,
        ] {
            let fam = DensityFamily::new(kind, 7, 25);
            let a = sample_family(&s, &fam).unwrap();
            let b = sample_family(&s, &fam).unwrap();
            for (x, y) in a.iter().zip(&b) {
                let xb: Vec<u64> = x.h().iter().map(|v| v.to_bits()).collect();
                let yb: Vec<u64> = y.h().iter().map(|v| v.to_bits()).collect();
                assert_eq!(xb, yb);
            }
        }
    }

    #[test]
    fn truncation_respects_level() {
        let s = gaussian_grid(-6.0, 6.0, 121).unwrap();
        let fam = DensityFamily::new(FamilyKind::Truncation, 11, 60).with_cut_levels(alloc::vec![1.5, 3.0]);
        for d in sample_family(&s, &fam).unwrap() {
            assert!(d.sup(&s) <= 3.0);
            let mass = s.integrate(d.h());
            assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clip_matches_direct_level() {
        let s = gaussian_grid(-3.0, 3.0, 31).unwrap();
        let d = Density::point_mass(&s, 15).unwrap();
        // a point mass cannot be clipped below 1/μ(support) = 1
        let c = clip_density(&s, &d, 2.0);
        assert!(c.is_err());
        let fam = DensityFamily::new(FamilyKind::ExponentialTilt, 1, 1).with_scales(2.0, 2.0);
        let d = sample_family(&s, &fam).unwrap().remove(0);
        let c = clip_density(&s, &d, 2.0).unwrap();
        assert!(c.sup(&s) <= 2.0);
        assert!((c.sup(&s) - 2.0).abs() < 1e-12);
    }
}
