//! Dirichlet forms on finite spaces and the spectral constants they define.
//!
//! A form is stored as symmetric conductances `w_ij = μ_i Q_ij` on edges
//! `i < j`, so that
//!
//! ```text
//! E(f, f) = Σ_{i<j} w_ij (f_j - f_i)²
//! ```
//!
//! On a grid the gradient form uses `w_{i,i+1} = (μ_i + μ_{i+1}) / (2 Δx²)`,
//! a finite-difference stand-in for `∫|∇f|² dμ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};
use crate::space::{check_measure, MetricMeasureSpace};

/// Tolerance for detailed balance `μ_i Q_ij = μ_j Q_ji`.
pub const REVERSIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormMode {
    RateMatrix,
    GridGradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletForm {
    mode: FormMode,
    mu: Vec<f64>,
    /// `(i, j, w_ij)` with `i < j` and `w_ij > 0`, sorted.
    edges: Vec<(usize, usize, f64)>,
}

impl DirichletForm {
    /// Form of a rate matrix (row-major `n × n`, off-diagonal entries used)
    /// that is reversible for `μ`.
    pub fn from_rates(mu: &[f64], rates: &[f64]) -> Result<Self> {
        let n = mu.len();
        check_measure(mu)?;
        if rates.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: rates.len(),
            });
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (qij, qji) = (rates[i * n + j], rates[j * n + i]);
                if !(qij >= 0.0 && qji >= 0.0 && qij.is_finite() && qji.is_finite()) {
                    return Err(invalid("rates", format!("rate ({i}, {j}) must be finite and ≥ 0")));
                }
                let (a, b) = (mu[i] * qij, mu[j] * qji);
                if (a - b).abs() > REVERSIBILITY_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(invalid(
                        "rates",
                        format!("not reversible at ({i}, {j}): {a:e} vs {b:e}"),
                    ));
                }
                let w = 0.5 * (a + b);
                if w > 0.0 {
                    edges.push((i, j, w));
                }
            }
        }
        Ok(Self {
            mode: FormMode::RateMatrix,
            mu: mu.to_vec(),
            edges,
        })
    }

    /// Finite-difference gradient form of a grid space.
    pub fn grid_gradient(space: &MetricMeasureSpace) -> Result<Self> {
        let grid = space
            .grid()
            .ok_or_else(|| invalid("space", "gradient form needs a grid space"))?;
        let mu = space.mu();
        let scale = 1.0 / (grid.step * grid.step);
        let edges = (0..mu.len() - 1)
            .map(|i| (i, i + 1, 0.5 * (mu[i] + mu[i + 1]) * scale))
            .filter(|e| e.2 > 0.0)
            .collect();
        Ok(Self {
            mode: FormMode::GridGradient,
            mu: mu.to_vec(),
            edges,
        })
    }

    /// Form from symmetric conductances, used by generators.
    pub(crate) fn from_conductances(mode: FormMode, mu: Vec<f64>, edges: Vec<(usize, usize, f64)>) -> Self {
        Self { mode, mu, edges }
    }

    pub fn mode(&self) -> FormMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// `E(f, f)`.
    pub fn energy(&self, f: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|&(i, j, w)| {
                let d = f[j] - f[i];
                w * d * d
            })
            .sum()
    }

    /// Rate `Q_ij = w_ij / μ_i` (zero off the edge set or where `μ_i = 0`).
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        match self.edges.binary_search_by(|e| (e.0, e.1).cmp(&(a, b))) {
            Ok(k) if self.mu[i] > 0.0 => self.edges[k].2 / self.mu[i],
            _ => 0.0,
        }
    }
}

/// `Var_μ(f)`, computed around the mean.
pub fn variance(mu: &[f64], f: &[f64]) -> f64 {
    let mean: f64 = mu.iter().zip(f).map(|(m, x)| m * x).sum();
    mu.iter().zip(f).map(|(m, x)| m * (x - mean) * (x - mean)).sum()
}

/// `Ent_μ(f²) = ∫f² log f² dμ - ∫f² dμ log ∫f² dμ`.
pub fn entropy_of_square(mu: &[f64], f: &[f64]) -> f64 {
    let m: f64 = mu.iter().zip(f).map(|(w, x)| w * x * x).sum();
    if m == 0.0 {
        return 0.0;
    }
    // Σ μ f² log(f²/m), every term relative to the mean keeps it accurate
    mu.iter()
        .zip(f)
        .map(|(w, x)| {
            let s = x * x;
            if s > 0.0 {
                w * s * (s / m).ln()
            } else {
                0.0
            }
        })
        .sum()
}

/// Best constant in `Var_μ(f) ≤ C E(f, f)` and a function attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareConstant {
    pub value: f64,
    /// Spectral gap `1 / value`.
    pub gap: f64,
    /// Eigenfunction, zero off the support of μ, normalized to `Var = 1`.
    pub witness: Vec<f64>,
}

/// `C_P = 1/λ₁` where `λ₁` is the smallest nonzero eigenvalue of
/// `D^{-1/2} K D^{-1/2}` (`K` the conductance Laplacian, `D = diag μ`),
/// restricted to the support of μ.
pub fn poincare_constant(form: &DirichletForm) -> Result<PoincareConstant> {
    let support: Vec<usize> = (0..form.n()).filter(|&i| form.mu[i] > 0.0).collect();
    let m = support.len();
    if m < 2 {
        return Err(Error::Undefined("variance vanishes on a one-point support".into()));
    }
    let mut local = vec![usize::MAX; form.n()];
    support.iter().enumerate().for_each(|(k, &i)| local[i] = k);
    let inner: Vec<(usize, usize, f64)> = form
        .edges
        .iter()
        .filter(|e| local[e.0] != usize::MAX && local[e.1] != usize::MAX)
        .map(|&(i, j, w)| (local[i], local[j], w))
        .collect();
    check_connected(m, &inner)?;

    let sqrt_mu: Vec<f64> = support.iter().map(|&i| form.mu[i].sqrt()).collect();
    let mut s = DMatrix::<f64>::zeros(m, m);
    for &(a, b, w) in &inner {
        let off = w / (sqrt_mu[a] * sqrt_mu[b]);
        s[(a, b)] -= off;
        s[(b, a)] -= off;
        s[(a, a)] += w / (sqrt_mu[a] * sqrt_mu[a]);
        s[(b, b)] += w / (sqrt_mu[b] * sqrt_mu[b]);
    }
    // push the constant direction √μ above the rest of the spectrum
    let shift = 2.0 * s.diagonal().iter().fold(0.0f64, |acc, x| acc.max(*x)) + 1.0;
    for a in 0..m {
        for b in 0..m {
            s[(a, b)] += shift * sqrt_mu[a] * sqrt_mu[b];
        }
    }
    let eig = SymmetricEigen::new(s);
    let (k, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.partial_cmp(y.1).unwrap_or(core::cmp::Ordering::Equal))
        .ok_or_else(|| Error::Undefined("empty spectrum".into()))?;
    if !(lambda > 0.0) {
        return Err(Error::Disconnected(format!("nonpositive spectral gap {lambda:e}")));
    }
    let v = eig.eigenvectors.column(k);
    let mut witness = vec![0.0; form.n()];
    for (a, &i) in support.iter().enumerate() {
        witness[i] = v[a] / sqrt_mu[a];
    }
    let var = variance(&form.mu, &witness);
    let scale = 1.0 / var.sqrt();
    // fix the sign so the witness is reproducible
    let sign = if witness.iter().find(|x| x.abs() > 0.0).copied().unwrap_or(1.0) < 0.0 {
        -1.0
    } else {
        1.0
    };
    witness.iter_mut().for_each(|x| *x *= sign * scale);
    Ok(PoincareConstant {
        value: 1.0 / lambda,
        gap: lambda,
        witness,
    })
}

fn check_connected(m: usize, edges: &[(usize, usize, f64)]) -> Result<()> {
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b, _) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let root = find(&mut parent, 0);
    let components = (0..m).filter(|&x| find(&mut parent, x) != root).count();
    if components > 0 {
        return Err(Error::Disconnected(format!(
            "{components} support points unreachable from the first"
        )));
    }
    Ok(())
}

/// Exponents `2 - 2^{-k}`, `k = 0..=40`, at which the `I(α)` ratio is sampled.
pub fn lo_alpha_grid() -> Vec<f64> {
    (0..=40).map(|k| 2.0 - 2f64.powi(-k)).collect()
}

/// `sup_p (∫f² - (∫|f|^p)^{2/p}) / (2 - p)^α` over [`lo_alpha_grid`], divided
/// by `E(f, f)`.
pub fn lo_alpha_value(form: &DirichletForm, f: &[f64], alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} outside [0, 1]")));
    }
    if f.len() != form.n() {
        return Err(Error::Dimension {
            expected: form.n(),
            got: f.len(),
        });
    }
    let energy = form.energy(f);
    if !(energy > 0.0) {
        return Err(Error::Undefined("E(f, f) = 0 for a constant function".into()));
    }
    let g: Vec<f64> = f.iter().map(|x| x.abs()).collect();
    let best = lo_alpha_grid()
        .into_iter()
        .map(|p| power_gap(&form.mu, &g, p) / (2.0 - p).powf(alpha))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best / energy)
}

/// `∫g² - (∫g^p)^{2/p}` for `g ≥ 0`, evaluated without cancellation as
/// `p → 2`: with `m = ∫g²` and `ρ = g²μ/m`,
/// `(∫g^p)^{2/p} = m · exp((2/p) log ∫g^{p-2} dρ + ((2-p)/p) log m)`.
pub(crate) fn power_gap(mu: &[f64], g: &[f64], p: f64) -> f64 {
    let m: f64 = mu.iter().zip(g).map(|(w, x)| w * x * x).sum();
    if m == 0.0 {
        return 0.0;
    }
    let inner: f64 = mu
        .iter()
        .zip(g)
        .filter(|(w, x)| **w > 0.0 && **x > 0.0)
        .map(|(w, x)| w * x * x / m * ((p - 2.0) * x.ln()).exp_m1())
        .sum();
    // zeros of g carry no ρ-mass
    let exponent = (2.0 / p) * inner.ln_1p() + ((2.0 - p) / p) * m.ln();
    -m * exponent.exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::gaussian_grid;

    #[test]
    fn two_state_unit_rates() {
        let form = DirichletForm::from_rates(&[0.5, 0.5], &[-1.0, 1.0, 1.0, -1.0]).unwrap();
        let c = poincare_constant(&form).unwrap();
        assert!((c.value - 0.5).abs() < 1e-14);
        assert!((c.gap - 2.0).abs() < 1e-13);
    }

    #[test]
    fn complete_graph_uniform() {
        for n in [3usize, 5, 8] {
            let mu = vec![1.0 / n as f64; n];
            let mut q = vec![1.0; n * n];
            (0..n).for_each(|i| q[i * n + i] = -(n as f64 - 1.0));
            let c = poincare_constant(&DirichletForm::from_rates(&mu, &q).unwrap()).unwrap();
            assert!((c.value - 1.0 / n as f64).abs() < 1e-13, "{n}: {}", c.value);
        }
    }

    #[test]
    fn witness_attains_the_constant() {
        let s = gaussian_grid(-6.0, 6.0, 121).unwrap();
        let form = DirichletForm::grid_gradient(&s).unwrap();
        let c = poincare_constant(&form).unwrap();
        let ratio = variance(s.mu(), &c.witness) / form.energy(&c.witness);
        assert!((ratio / c.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn irreversible_and_disconnected_are_rejected() {
        assert!(DirichletForm::from_rates(&[0.5, 0.5], &[-1.0, 1.0, 2.0, -2.0]).is_err());
        let mu = [0.25; 4];
        let mut q = [0.0; 16];
        q[1] = 1.0;
        q[4] = 1.0;
        q[2 * 4 + 3] = 1.0;
        q[3 * 4 + 2] = 1.0;
        let form = DirichletForm::from_rates(&mu, &q).unwrap();
        assert!(matches!(poincare_constant(&form), Err(Error::Disconnected(_))));
    }

    #[test]
    fn constant_function_has_no_ratio() {
        let form = DirichletForm::from_rates(&[0.5, 0.5], &[-1.0, 1.0, 1.0, -1.0]).unwrap();
        assert!(lo_alpha_value(&form, &[2.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn power_gap_matches_direct_formula_away_from_two() {
        let mu = [0.2, 0.3, 0.5];
        let g = [0.5, 1.0, 2.0];
        for p in [1.0, 1.3, 1.7] {
            let m: f64 = mu.iter().zip(&g).map(|(w, x)| w * x * x).sum();
            let q: f64 = mu.iter().zip(&g).map(|(w, x)| w * x.powf(p)).sum();
            let direct = m - q.powf(2.0 / p);
            assert!((power_gap(&mu, &g, p) - direct).abs() < 1e-14);
        }
    }
}
