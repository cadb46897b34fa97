//! Exact and entropic optimal transport on a finite metric measure space.
//!
//! | Function | Method | Scale |
//! |----------|--------|-------|
//! | [`solve_exact`] | transportation simplex, Bland's rule; O(n) monotone coupling on the line | n ≲ 500 off the line |
//! | [`solve_entropic`] | log-domain Sinkhorn with ε-scaling | n ≲ 10³ |
//! | [`dual_certificate`] | potentials of the optimal basis | as `solve_exact` |
//!
//! Plans couple a *source* (rows) with a *target* (columns). For `W_p(ν, μ)`
//! the source is `ν = hμ` and the target is `μ`. Costs are `d^p` with
//! `p ∈ [1, 2]`.

mod entropic;
mod simplex;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

pub use entropic::{solve_entropic, EntropicOptions};

use crate::error::{invalid, Result};
use crate::space::{check_weights, pow_dist, Density, Metric, MetricMeasureSpace};
use simplex::{Basis, SimplexOutcome};

/// A coupling stored by its nonzero (or basic) cells.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub n: usize,
    /// `(source index, target index, mass)`.
    pub entries: Vec<(usize, usize, f64)>,
    /// `Σ π_ij d_ij^p`.
    pub cost: f64,
    pub p: f64,
    /// Simplex pivots or Sinkhorn sweeps spent.
    pub iterations: usize,
}

impl TransportPlan {
    /// `cost^{1/p}`.
    pub fn distance(&self) -> f64 {
        self.cost.max(0.0).powf(1.0 / self.p)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.n];
        self.entries.iter().for_each(|&(i, _, m)| r[i] += m);
        r
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n];
        self.entries.iter().for_each(|&(_, j, m)| c[j] += m);
        c
    }

    /// Row-major `n × n` matrix.
    pub fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n * self.n];
        self.entries
            .iter()
            .for_each(|&(i, j, m)| out[i * self.n + j] += m);
        out
    }

    pub fn recompute_cost(&self, space: &MetricMeasureSpace) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, m)| m * pow_dist(space.dist(i, j), self.p))
            .sum()
    }

    /// Largest absolute deviation of either marginal from the given weights.
    pub fn marginal_residual(&self, source: &[f64], target: &[f64]) -> f64 {
        let r = self.row_sums();
        let c = self.col_sums();
        r.iter()
            .zip(source)
            .chain(c.iter().zip(target))
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// Kantorovich dual pair: `g_i ≤ f_j + d_ij^p` for all `i, j`, normalized so
/// that `Σ f_j μ_j = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPair {
    /// Potential on the target side.
    pub f: Vec<f64>,
    /// Potential on the source side.
    pub g: Vec<f64>,
    /// `Σ g_i ν_i - Σ f_j μ_j`.
    pub value: f64,
    /// `primal cost - value`, evaluated as `Σ π_ij (f_j + d_ij^p - g_i)`
    /// over the optimal plan `π`.
    pub gap: f64,
}

impl DualPair {
    /// `min_{i,j} (f_j + d_ij^p - g_i)`; nonnegative for a feasible pair.
    pub fn min_slack(&self, space: &MetricMeasureSpace, p: f64) -> f64 {
        let n = space.n();
        let mut s = f64::INFINITY;
        for i in 0..n {
            for j in 0..n {
                s = s.min(self.f[j] + pow_dist(space.dist(i, j), p) - self.g[i]);
            }
        }
        s
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(1.0..=2.0).contains(&p) {
        return Err(invalid("p", format!("exponent {p} outside [1, 2]")));
    }
    Ok(())
}

struct Restricted {
    rows: Vec<usize>,
    cols: Vec<usize>,
    supply: Vec<f64>,
    demand: Vec<f64>,
}

fn restrict(source: &[f64], target: &[f64]) -> Restricted {
    let rows: Vec<usize> = (0..source.len()).filter(|&i| source[i] > 0.0).collect();
    let cols: Vec<usize> = (0..target.len()).filter(|&j| target[j] > 0.0).collect();
    let mut supply: Vec<f64> = rows.iter().map(|&i| source[i]).collect();
    let mut demand: Vec<f64> = cols.iter().map(|&j| target[j]).collect();
    // balance exactly: both sides sum to the same float
    let s: f64 = supply.iter().sum();
    let d: f64 = demand.iter().sum();
    supply.iter_mut().for_each(|x| *x /= s);
    demand.iter_mut().for_each(|x| *x /= d);
    Restricted {
        rows,
        cols,
        supply,
        demand,
    }
}

struct ExactSolution {
    plan: TransportPlan,
    restricted: Restricted,
    u: Vec<f64>,
    v: Vec<f64>,
}

fn exact_inner(
    space: &MetricMeasureSpace,
    source: &[f64],
    target: &[f64],
    p: f64,
) -> Result<ExactSolution> {
    check_exponent(p)?;
    let n = space.n();
    check_weights("source", source, n)?;
    check_weights("target", target, n)?;
    let r = restrict(source, target);
    let cost_of = |a: usize, b: usize| pow_dist(space.dist(r.rows[a], r.cols[b]), p);
    let (outcome_basis, u, v, iterations) = match space.metric() {
        // sorted coordinates: the north-west corner is the monotone coupling
        Metric::Line { .. } => {
            let basis = Basis::north_west(&r.supply, &r.demand);
            let (u, v) = basis.potentials(&cost_of);
            (basis, u, v, 0)
        }
        Metric::Matrix { .. } => {
            let k = r.cols.len();
            let mut cost = Vec::with_capacity(r.rows.len() * k);
            for a in 0..r.rows.len() {
                for b in 0..k {
                    cost.push(cost_of(a, b));
                }
            }
            let SimplexOutcome {
                basis,
                u,
                v,
                iterations,
            } = simplex::solve_dense(&r.supply, &r.demand, &cost);
            (basis, u, v, iterations)
        }
    };
    let mut entries = Vec::with_capacity(outcome_basis.cells.len());
    let mut total = 0.0;
    for c in &outcome_basis.cells {
        if c.flow > 0.0 {
            entries.push((r.rows[c.row], r.cols[c.col], c.flow));
            total += c.flow * cost_of(c.row, c.col);
        }
    }
    Ok(ExactSolution {
        plan: TransportPlan {
            n,
            entries,
            cost: total,
            p,
            iterations,
        },
        restricted: r,
        u,
        v,
    })
}

/// Optimal coupling of `source` (rows) and `target` (columns) for the cost
/// `d^p`. Both must be probability vectors on the space.
pub fn solve_exact(
    space: &MetricMeasureSpace,
    source: &[f64],
    target: &[f64],
    p: f64,
) -> Result<TransportPlan> {
    exact_inner(space, source, target, p).map(|s| s.plan)
}

/// `W_p^p(ν, μ)` for `ν = hμ`.
pub fn wasserstein_pow(space: &MetricMeasureSpace, nu: &Density, p: f64) -> Result<f64> {
    let w = nu.weights(space);
    solve_exact(space, &w, space.mu(), p).map(|plan| plan.cost)
}

/// `W_p^p` between two arbitrary probability vectors on the space.
pub fn wasserstein_pow_between(
    space: &MetricMeasureSpace,
    a: &[f64],
    b: &[f64],
    p: f64,
) -> Result<f64> {
    solve_exact(space, a, b, p).map(|plan| plan.cost)
}

/// Optimal dual pair for the problem solved by [`solve_exact`]. Columns
/// outside the target support get `f_j = max_i (g_i - d_ij^p)`; then every
/// row is set to the infimum convolution `g = Qf`, the tightest feasible
/// choice.
pub fn dual_certificate(
    space: &MetricMeasureSpace,
    source: &[f64],
    target: &[f64],
    p: f64,
) -> Result<DualPair> {
    let sol = exact_inner(space, source, target, p)?;
    let n = space.n();
    if source == target {
        // the identity coupling is optimal and (0, 0) certifies it
        return Ok(DualPair {
            f: vec![0.0; n],
            g: vec![0.0; n],
            value: 0.0,
            gap: sol.plan.cost,
        });
    }
    let r = &sol.restricted;
    let mut g = vec![f64::NAN; n];
    let mut f = vec![f64::NAN; n];
    for (a, &i) in r.rows.iter().enumerate() {
        g[i] = sol.u[a];
    }
    for (b, &j) in r.cols.iter().enumerate() {
        f[j] = -sol.v[b];
    }
    let mut in_cols = vec![false; n];
    r.cols.iter().for_each(|&j| in_cols[j] = true);
    for j in 0..n {
        if !in_cols[j] {
            f[j] = r
                .rows
                .iter()
                .map(|&i| g[i] - pow_dist(space.dist(i, j), p))
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    let shift: f64 = f.iter().zip(target).map(|(a, b)| a * b).sum();
    f.iter_mut().for_each(|x| *x -= shift);
    // re-tighten g after the shift so every constraint holds in floating point
    g = inf_convolution(space, &f, p)?;
    let value: f64 = g.iter().zip(source).map(|(a, b)| a * b).sum::<f64>()
        - f.iter().zip(target).map(|(a, b)| a * b).sum::<f64>();
    // primal minus dual through complementary slackness: each term is
    // nonnegative as computed, so rounding cannot make the gap negative
    let gap = sol
        .plan
        .entries
        .iter()
        .map(|&(i, j, m)| m * (f[j] + pow_dist(space.dist(i, j), p) - g[i]))
        .sum();
    Ok(DualPair { f, g, value, gap })
}

/// Infimum convolution `(Qf)_i = min_j (f_j + d_ij^p)`.
pub fn inf_convolution(space: &MetricMeasureSpace, f: &[f64], p: f64) -> Result<Vec<f64>> {
    check_exponent(p)?;
    let n = space.n();
    if f.len() != n {
        return Err(crate::Error::Dimension {
            expected: n,
            got: f.len(),
        });
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(invalid("f", "values must be finite"));
    }
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| f[j] + pow_dist(space.dist(i, j), p))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

/// Cost of the product coupling `ν ⊗ μ`: `Σ_ij d_ij^p ν_i μ_j`.
pub fn independent_coupling_cost(space: &MetricMeasureSpace, nu: &Density, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let w = nu.weights(space);
    let mu = space.mu();
    let n = space.n();
    let mut total = 0.0;
    for i in 0..n {
        if w[i] == 0.0 {
            continue;
        }
        let row: f64 = (0..n).map(|j| pow_dist(space.dist(i, j), p) * mu[j]).sum();
        total += w[i] * row;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_grid_space, gaussian_grid, MetricMeasureSpace};
    use alloc::vec;

    fn three_points() -> MetricMeasureSpace {
        MetricMeasureSpace::from_matrix(
            vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.5], vec![2.0, 1.5, 0.0]],
            vec![0.2, 0.5, 0.3],
            None,
        )
        .unwrap()
    }

    #[test]
    fn identity_coupling_costs_nothing() {
        let s = three_points();
        let plan = solve_exact(&s, s.mu(), s.mu(), 2.0).unwrap();
        assert_eq!(plan.cost, 0.0);
        for &(i, j, _) in &plan.entries {
            assert_eq!(i, j);
        }
        let dual = dual_certificate(&s, s.mu(), s.mu(), 2.0).unwrap();
        assert!(dual.value.abs() < 1e-15);
        assert!(dual.f.iter().chain(&dual.g).all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn point_masses() {
        let s = three_points();
        for p in [1.0, 1.5, 2.0] {
            let plan = solve_exact(&s, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0], p).unwrap();
            assert!((plan.cost - 2.0f64.powf(p)).abs() < 1e-15);
        }
        let two = build_grid_space(0.0, 3.0, 2, &[0.0, 0.0]).unwrap();
        let d = dual_certificate(&two, &[1.0, 0.0], &[0.0, 1.0], 2.0).unwrap();
        assert_eq!(d.value, 9.0);
        assert!(d.min_slack(&two, 2.0) >= -1e-12);
    }

    #[test]
    fn rejects_non_probability_marginals() {
        let s = three_points();
        assert!(solve_exact(&s, &[0.5, 0.5, 0.5], s.mu(), 2.0).is_err());
        assert!(solve_exact(&s, s.mu(), s.mu(), 2.5).is_err());
    }

    #[test]
    fn independent_coupling_two_points() {
        let s = build_grid_space(0.0, 1.0, 2, &[0.0, 0.0]).unwrap();
        let c = independent_coupling_cost(&s, &Density::uniform(2), 2.0).unwrap();
        assert!((c - 0.5).abs() < 1e-15);
        let one = MetricMeasureSpace::from_matrix(vec![vec![0.0]], vec![1.0], None).unwrap();
        let pm = Density::point_mass(&one, 0).unwrap();
        assert_eq!(independent_coupling_cost(&one, &pm, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn inf_convolution_cases() {
        let s = three_points();
        let q = inf_convolution(&s, &[3.0, 3.0, 3.0], 2.0).unwrap();
        assert_eq!(q, vec![3.0, 3.0, 3.0]);
        let big = 1e9;
        let q = inf_convolution(&s, &[0.0, big, big], 2.0).unwrap();
        assert_eq!(q, vec![0.0, 1.0, 4.0]);
        let f = [0.3, -1.0, 2.0];
        let q = inf_convolution(&s, &f, 1.0).unwrap();
        for i in 0..3 {
            assert!(q[i] <= f[i]);
            for j in 0..3 {
                assert!(q[i] <= f[j] + s.dist(i, j));
            }
        }
    }

    #[test]
    fn line_path_matches_simplex() {
        let line = gaussian_grid(-2.0, 2.0, 9).unwrap();
        let coords = line.coords().unwrap().to_vec();
        let dist: Vec<Vec<f64>> = coords
            .iter()
            .map(|x| coords.iter().map(|y| (x - y).abs()).collect())
            .collect();
        let dense = MetricMeasureSpace::from_matrix(dist, line.mu().to_vec(), None).unwrap();
        let nu = [0.3, 0.0, 0.1, 0.05, 0.05, 0.2, 0.0, 0.1, 0.2];
        for p in [1.0, 1.3, 2.0] {
            let a = solve_exact(&line, &nu, line.mu(), p).unwrap();
            let b = solve_exact(&dense, &nu, line.mu(), p).unwrap();
            assert!((a.cost - b.cost).abs() < 1e-12, "{} vs {}", a.cost, b.cost);
            let dual = dual_certificate(&line, &nu, line.mu(), p).unwrap();
            assert!(dual.min_slack(&line, p) > -1e-10);
            assert!(dual.gap.abs() < 1e-12);
        }
    }
}
