//! Finite metric measure spaces and densities relative to the reference measure.
//!
//! A space carries its metric either as a dense symmetric matrix or, for
//! one-dimensional grids, implicitly through sorted coordinates. The implicit
//! form keeps fine grids (10⁵ nodes and more) cheap: distances are computed on
//! demand and exact transport on the line is solved in linear time.

use alloc::format;
use alloc::vec::Vec;
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// Tolerance used for the metric axioms and the normalization of `mu`.
pub const AXIOM_TOL: f64 = 1e-12;
/// Tolerance accepted by [`validate_density`] on the total mass.
pub const DENSITY_MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Dense row-major `n × n` distance matrix.
    Matrix { n: usize, values: Vec<f64> },
    /// Points on the real line with strictly increasing coordinates;
    /// `d(i, j) = |x_i - x_j|`.
    Line { coords: Vec<f64> },
}

impl Metric {
    pub fn len(&self) -> usize {
        match self {
            Metric::Matrix { n, .. } => *n,
            Metric::Line { coords } => coords.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match self {
            Metric::Matrix { n, values } => values[i * n + j],
            Metric::Line { coords } => (coords[i] - coords[j]).abs(),
        }
    }
}

/// Uniform grid description kept alongside grid-built spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridInfo {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

/// A finite metric space `(E, d)` with reference probability `mu` and base
/// point `x0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMeasureSpace {
    metric: Metric,
    mu: Vec<f64>,
    x0: usize,
    grid: Option<GridInfo>,
}

impl MetricMeasureSpace {
    /// Builds a space from a dense distance matrix. The matrix must be
    /// symmetric with zero diagonal and satisfy the triangle inequality on
    /// every triple. When `x0` is `None` the metric 1-median of `mu` is used.
    pub fn from_matrix(dist: Vec<Vec<f64>>, mu: Vec<f64>, x0: Option<usize>) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidMetric("empty point set".into()));
        }
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        let metric = Metric::Matrix { n, values };
        check_metric_axioms(&metric)?;
        Self::assemble(metric, mu, x0, None)
    }

    /// Builds a space on the real line from strictly increasing coordinates.
    pub fn from_line(coords: Vec<f64>, mu: Vec<f64>, x0: Option<usize>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidMetric("empty point set".into()));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMetric("non-finite coordinate".into()));
        }
        if coords.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidMetric(
                "line coordinates must be strictly increasing".into(),
            ));
        }
        Self::assemble(Metric::Line { coords }, mu, x0, None)
    }

    fn assemble(
        metric: Metric,
        mu: Vec<f64>,
        x0: Option<usize>,
        grid: Option<GridInfo>,
    ) -> Result<Self> {
        let n = metric.len();
        if mu.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: mu.len(),
            });
        }
        check_probability(&mu, AXIOM_TOL).map_err(Error::InvalidMeasure)?;
        let x0 = match x0 {
            Some(k) if k < n => k,
            Some(k) => return Err(invalid("x0", format!("index {k} out of range 0..{n}"))),
            None => median_point(&metric, &mu),
        };
        Ok(Self {
            metric,
            mu,
            x0,
            grid,
        })
    }

    pub fn n(&self) -> usize {
        self.metric.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn x0(&self) -> usize {
        self.x0
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.metric.dist(i, j)
    }

    /// Per-point coordinates for spaces living on the line.
    pub fn coords(&self) -> Option<&[f64]> {
        match &self.metric {
            Metric::Line { coords } => Some(coords),
            Metric::Matrix { .. } => None,
        }
    }

    pub fn grid(&self) -> Option<GridInfo> {
        self.grid
    }

    /// Returns a copy with a different base point.
    pub fn with_base_point(mut self, x0: usize) -> Result<Self> {
        if x0 >= self.n() {
            return Err(invalid("x0", format!("index {x0} out of range")));
        }
        self.x0 = x0;
        Ok(self)
    }

    /// `d(x_i, x0)^p` for every point.
    pub fn dist_to_base_pow(&self, p: f64) -> Vec<f64> {
        (0..self.n())
            .map(|i| pow_dist(self.dist(i, self.x0), p))
            .collect()
    }

    /// Dense `d^p` matrix, row-major. Quadratic in memory: meant for
    /// desk-scale spaces.
    pub fn cost_matrix(&self, p: f64) -> Vec<f64> {
        let n = self.n();
        let mut c = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                c.push(pow_dist(self.dist(i, j), p));
            }
        }
        c
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        match &self.metric {
            Metric::Line { coords } => coords[coords.len() - 1] - coords[0],
            Metric::Matrix { values, .. } => values.iter().fold(0.0, |m, &d| m.max(d)),
        }
    }

    /// `∫ f dμ` with a fixed left-to-right summation order.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.mu.iter().zip(f).map(|(m, v)| m * v).sum()
    }

    /// Indices carrying positive reference mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.mu[i] > 0.0).collect()
    }
}

#[inline]
pub(crate) fn pow_dist(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        d.powf(p)
    }
}

/// Equally spaced grid on `[lo, hi]` (endpoints included) with Boltzmann
/// weights `mu_i ∝ exp(-V_i) Δx`. Distances are `|x_i - x_j|` and the base
/// point is the μ-median node.
pub fn build_grid_space(lo: f64, hi: f64, n: usize, potential: &[f64]) -> Result<MetricMeasureSpace> {
    if n < 2 {
        return Err(invalid("n", "a grid needs at least two nodes"));
    }
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(invalid("hi", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    if potential.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: potential.len(),
        });
    }
    if let Some(i) = potential.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidMeasure(format!(
            "potential is not finite at node {i}"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    let coords = grid_coords(lo, hi, n);
    // shift by min V so the largest weight is exp(0)
    let vmin = potential.iter().cloned().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = potential.iter().map(|v| (vmin - v).exp() * step).collect();
    let z: f64 = raw.iter().sum();
    let mu: Vec<f64> = raw.iter().map(|w| w / z).collect();
    let metric = Metric::Line { coords };
    let x0 = median_point(&metric, &mu);
    Ok(MetricMeasureSpace {
        metric,
        mu,
        x0,
        grid: Some(GridInfo { lo, hi, step }),
    })
}

/// Grid space for the potential `V(x) = x²/2` (discretized standard Gaussian).
pub fn gaussian_grid(lo: f64, hi: f64, n: usize) -> Result<MetricMeasureSpace> {
    let v: Vec<f64> = grid_coords(lo, hi, n).iter().map(|x| 0.5 * x * x).collect();
    build_grid_space(lo, hi, n, &v)
}

/// Node coordinates `lo + (hi - lo) i / (n - 1)`, endpoints exact.
pub fn grid_coords(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let span = hi - lo;
    let last = (n.max(2) - 1) as f64;
    (0..n).map(|i| lo + span * i as f64 / last).collect()
}

fn check_probability(w: &[f64], tol: f64) -> core::result::Result<(), alloc::string::String> {
    if let Some(i) = w.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(format!("weight {i} is negative or not finite ({})", w[i]));
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > tol {
        return Err(format!("weights sum to {s}, not 1"));
    }
    Ok(())
}

/// Reference weights: nonnegative, summing to 1 within [`AXIOM_TOL`].
pub(crate) fn check_measure(mu: &[f64]) -> Result<()> {
    check_probability(mu, AXIOM_TOL).map_err(Error::InvalidMeasure)
}

pub(crate) fn check_weights(name: &'static str, w: &[f64], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: w.len(),
        });
    }
    check_probability(w, DENSITY_MASS_TOL).map_err(|r| invalid(name, r))
}

fn check_metric_axioms(metric: &Metric) -> Result<()> {
    let n = metric.len();
    let mut scale = 1.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = metric.dist(i, j);
            if !d.is_finite() || d < 0.0 {
                return Err(Error::InvalidMetric(format!(
                    "d({i},{j}) = {d} is negative or not finite"
                )));
            }
            scale = scale.max(d);
        }
    }
    let tol = AXIOM_TOL * scale;
    for i in 0..n {
        if metric.dist(i, i) != 0.0 {
            return Err(Error::InvalidMetric(format!("d({i},{i}) is not zero")));
        }
        for j in (i + 1)..n {
            if (metric.dist(i, j) - metric.dist(j, i)).abs() > tol {
                return Err(Error::InvalidMetric(format!("d({i},{j}) != d({j},{i})")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let dij = metric.dist(i, j);
            for k in 0..n {
                if metric.dist(i, k) > dij + metric.dist(j, k) + tol {
                    return Err(Error::InvalidMetric(format!(
                        "triangle inequality fails on ({i},{j},{k})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// μ-median: on the line the weighted median, otherwise the metric 1-median
/// `argmin_x Σ_j μ_j d(x, x_j)`. Ties go to the lowest index.
fn median_point(metric: &Metric, mu: &[f64]) -> usize {
    match metric {
        Metric::Line { .. } => {
            let mut acc = 0.0;
            for (i, m) in mu.iter().enumerate() {
                acc += m;
                if acc >= 0.5 {
                    return i;
                }
            }
            mu.len() - 1
        }
        Metric::Matrix { n, .. } => {
            let mut best = (f64::INFINITY, 0);
            for i in 0..*n {
                let s: f64 = (0..*n).map(|j| mu[j] * metric.dist(i, j)).sum();
                if s < best.0 {
                    best = (s, i);
                }
            }
            best.1
        }
    }
}

/// `h = dν/dμ`, a nonnegative function with `Σ h_i μ_i = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    h: Vec<f64>,
}

impl Density {
    /// The reference measure itself, `h ≡ 1`.
    pub fn uniform(n: usize) -> Self {
        Self { h: alloc::vec![1.0; n] }
    }

    /// Normalized indicator of the single atom `k`: `h = 1/μ_k` at `k`.
    pub fn point_mass(space: &MetricMeasureSpace, k: usize) -> Result<Self> {
        let mk = *space
            .mu()
            .get(k)
            .ok_or_else(|| invalid("k", format!("index {k} out of range")))?;
        if mk <= 0.0 {
            return Err(Error::InvalidDensity(format!("μ has no mass at {k}")));
        }
        let mut h = alloc::vec![0.0; space.n()];
        h[k] = 1.0 / mk;
        Ok(Self { h })
    }

    /// Density of the probability vector `nu` with respect to `mu`.
    pub fn from_weights(space: &MetricMeasureSpace, nu: &[f64]) -> Result<Self> {
        check_weights("nu", nu, space.n())?;
        let mut h = Vec::with_capacity(nu.len());
        for (i, (&v, &m)) in nu.iter().zip(space.mu()).enumerate() {
            if m > 0.0 {
                h.push(v / m);
            } else if v > 0.0 {
                return Err(Error::InvalidDensity(format!(
                    "ν charges point {i} where μ vanishes"
                )));
            } else {
                h.push(0.0);
            }
        }
        validate_density(space, h)
    }

    /// Rescales a nonnegative function to unit mass under `mu`.
    pub fn normalized(space: &MetricMeasureSpace, mut h: Vec<f64>) -> Result<Self> {
        if h.len() != space.n() {
            return Err(Error::Dimension {
                expected: space.n(),
                got: h.len(),
            });
        }
        if h.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidDensity("negative or non-finite entry".into()));
        }
        let mass = space.integrate(&h);
        if !(mass > 0.0) {
            return Err(Error::InvalidDensity("zero mass on the support of μ".into()));
        }
        h.iter_mut().for_each(|x| *x /= mass);
        Ok(Self { h })
    }

    /// Wraps values already known to be a density.
    pub(crate) fn from_raw(h: Vec<f64>) -> Self {
        Self { h }
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.h
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Point weights `ν_i = h_i μ_i`.
    pub fn weights(&self, space: &MetricMeasureSpace) -> Vec<f64> {
        self.h.iter().zip(space.mu()).map(|(h, m)| h * m).collect()
    }

    /// `max h` over the support of μ.
    pub fn sup(&self, space: &MetricMeasureSpace) -> f64 {
        self.h
            .iter()
            .zip(space.mu())
            .filter(|(_, m)| **m > 0.0)
            .fold(0.0, |acc, (h, _)| acc.max(*h))
    }

    /// True when `h = 1` on the support of μ (up to `tol`).
    pub fn is_reference(&self, space: &MetricMeasureSpace, tol: f64) -> bool {
        self.h
            .iter()
            .zip(space.mu())
            .all(|(h, m)| *m == 0.0 || (h - 1.0).abs() <= tol)
    }
}

/// Checks length, sign and mass (to [`DENSITY_MASS_TOL`]) of `h`.
pub fn validate_density(space: &MetricMeasureSpace, h: Vec<f64>) -> Result<Density> {
    if h.len() != space.n() {
        return Err(Error::Dimension {
            expected: space.n(),
            got: h.len(),
        });
    }
    if let Some(i) = h.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidDensity(format!(
            "entry {i} is negative or not finite ({})",
            h[i]
        )));
    }
    let mass = space.integrate(&h);
    if (mass - 1.0).abs() > DENSITY_MASS_TOL {
        return Err(Error::InvalidDensity(format!("mass is {mass}, expected 1")));
    }
    Ok(Density { h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn gaussian_grid_is_normalized_and_centered() {
        let s = gaussian_grid(-6.0, 6.0, 241).unwrap();
        let total: f64 = s.mu().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(s.x0(), 120);
        assert_eq!(s.coords().unwrap()[120], 0.0);
    }

    #[test]
    fn gaussian_grid_second_moment() {
        // Riemann sums of Gaussian moments, recomputed without the library
        let s = gaussian_grid(-6.0, 6.0, 241).unwrap();
        let dx = 12.0 / 240.0;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..241 {
            let x = -6.0 + dx * i as f64;
            let w = (-0.5 * x * x).exp();
            num += x * x * w;
            den += w;
        }
        let m2: f64 = s.integrate(&s.dist_to_base_pow(2.0));
        assert!((m2 - num / den).abs() < 1e-12);
        assert!((m2 - 1.0).abs() < 0.01);
    }

    #[test]
    fn two_node_grid() {
        let s = build_grid_space(-6.0, 6.0, 2, &[0.0, 0.0]).unwrap();
        assert_eq!(s.mu(), &[0.5, 0.5]);
        assert_eq!(s.dist(0, 1), 12.0);
    }

    #[test]
    fn non_finite_potential_rejected() {
        let err = build_grid_space(0.0, 1.0, 3, &[0.0, f64::NAN, 1.0]).unwrap_err();
        assert!(matches!(err, Error::InvalidMeasure(_)));
        assert!(build_grid_space(0.0, 1.0, 1, &[0.0]).is_err());
        assert!(build_grid_space(1.0, 0.0, 2, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn matrix_axioms_are_checked() {
        let ok = MetricMeasureSpace::from_matrix(
            vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
            vec![0.25, 0.5, 0.25],
            None,
        )
        .unwrap();
        assert_eq!(ok.x0(), 1);
        let triangle = MetricMeasureSpace::from_matrix(
            vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]],
            vec![0.25, 0.5, 0.25],
            None,
        );
        assert!(matches!(triangle, Err(Error::InvalidMetric(_))));
        let asym = MetricMeasureSpace::from_matrix(
            vec![vec![0.0, 1.0], vec![1.5, 0.0]],
            vec![0.5, 0.5],
            None,
        );
        assert!(asym.is_err());
        let bad_mu =
            MetricMeasureSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.6], None);
        assert!(matches!(bad_mu, Err(Error::InvalidMeasure(_))));
    }

    #[test]
    fn density_validation() {
        let s = build_grid_space(0.0, 1.0, 2, &[0.0, 0.0]).unwrap();
        assert!(validate_density(&s, vec![1.0, 1.0]).is_ok());
        assert!(validate_density(&s, vec![2.0, 0.0]).is_ok());
        assert!(matches!(
            validate_density(&s, vec![2.0, 0.1]),
            Err(Error::InvalidDensity(_))
        ));
        assert!(validate_density(&s, vec![2.5, -0.5]).is_err());
        assert!(validate_density(&s, vec![1.0]).is_err());
    }

    #[test]
    fn weights_and_point_masses() {
        let s = build_grid_space(0.0, 1.0, 4, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let d = Density::point_mass(&s, 2).unwrap();
        let w = d.weights(&s);
        assert!((w[2] - 1.0).abs() < 1e-15);
        let back = Density::from_weights(&s, &w).unwrap();
        assert_eq!(back.h()[2], d.h()[2]);
    }
}
