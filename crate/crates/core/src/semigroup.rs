//! Reversible generators on finite spaces and the heat semigroup `P_t`.
//!
//! A [`GeneratorSpec`] stores symmetric conductances `c_ij = μ_i Q_ij`, so
//! detailed balance holds by construction and `(Qh)_i = Σ_j Q_ij (h_j - h_i)`
//! annihilates constants exactly.
//!
//! | Size | Method |
//! |------|--------|
//! | `n ≤ 300` | uniformization: `P_τ = Σ_k Poisson(Λτ; k) (I + Q/Λ)^k`, steps with `Λτ ≤ 50` |
//! | `n > 300` | adaptive Dormand–Prince 5(4) on `∂_t h = Qh` |

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::dirichlet::{DirichletForm, FormMode};
use crate::entropy::entropy_of;
use crate::error::{invalid, Error, Result};
use crate::space::{check_measure, Density, MetricMeasureSpace};
use crate::transport::wasserstein_pow;

/// Size above which [`heat_flow`] switches to ODE integration.
pub const EXPONENTIAL_ACTION_MAX_N: usize = 300;

/// Largest Poisson mean per uniformization step.
const STEP_MEAN: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    mu: Vec<f64>,
    /// `(i, j, c_ij)`, `i < j`.
    edges: Vec<(usize, usize, f64)>,
    /// Per node: `(neighbor, Q_ij)`.
    rows: Vec<Vec<(usize, f64)>>,
    mode: FormMode,
}

impl GeneratorSpec {
    fn from_edges(mu: Vec<f64>, edges: Vec<(usize, usize, f64)>, mode: FormMode) -> Result<Self> {
        check_measure(&mu)?;
        if let Some(i) = mu.iter().position(|m| *m <= 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "generator needs μ > 0 everywhere; μ_{i} = {}",
                mu[i]
            )));
        }
        let mut rows = vec![Vec::new(); mu.len()];
        for &(i, j, c) in &edges {
            rows[i].push((j, c / mu[i]));
            rows[j].push((i, c / mu[j]));
        }
        rows.iter_mut().for_each(|r| r.sort_by_key(|e| e.0));
        Ok(Self { mu, edges, rows, mode })
    }

    /// Generator whose Dirichlet form is `form`: `Q_ij = w_ij / μ_i`.
    pub fn from_form(form: &DirichletForm) -> Result<Self> {
        Self::from_edges(form.mu().to_vec(), form.edges().to_vec(), form.mode())
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Off-diagonal rate `Q_ij`.
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0.0)
    }

    /// Dense row-major rate matrix with the diagonal set so rows sum to 0.
    pub fn dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut q = vec![0.0; n * n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, r) in row {
                q[i * n + j] = r;
                q[i * n + i] -= r;
            }
        }
        q
    }

    /// Largest exit rate `max_i Σ_j Q_ij`.
    pub fn max_rate(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|e| e.1).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|μ_i Q_ij - μ_j Q_ji|` relative to the conductance.
    pub fn detailed_balance_residual(&self) -> f64 {
        self.edges
            .iter()
            .map(|&(i, j, c)| (self.mu[i] * self.rate(i, j) - self.mu[j] * self.rate(j, i)).abs() / c)
            .fold(0.0, f64::max)
    }

    /// The Dirichlet form of this generator.
    pub fn dirichlet_form(&self) -> DirichletForm {
        DirichletForm::from_conductances(self.mode, self.mu.clone(), self.edges.clone())
    }

    /// `out = Q h`.
    pub fn apply(&self, h: &[f64], out: &mut [f64]) {
        for (i, row) in self.rows.iter().enumerate() {
            let hi = h[i];
            out[i] = row.iter().map(|&(j, r)| r * (h[j] - hi)).sum();
        }
    }
}

/// Nearest-neighbor Metropolis chain on a grid:
/// `Q_{i,i±1} = min(1, exp(V_i - V_{i±1})) / Δx²`.
pub fn metropolis_generator(space: &MetricMeasureSpace, potential: &[f64]) -> Result<GeneratorSpec> {
    let grid = space
        .grid()
        .ok_or_else(|| invalid("space", "Metropolis rates need a grid space"))?;
    let n = space.n();
    if potential.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: potential.len(),
        });
    }
    if potential.iter().any(|v| !v.is_finite()) {
        return Err(invalid("V", "potential must be finite"));
    }
    let scale = 1.0 / (grid.step * grid.step);
    let mu = space.mu();
    let edges = (0..n - 1)
        .map(|i| {
            // μ_i min(1, μ_{i+1}/μ_i) with the ratio taken from V
            let up = (potential[i] - potential[i + 1]).min(0.0).exp();
            let down = (potential[i + 1] - potential[i]).min(0.0).exp();
            let c = 0.5 * (mu[i] * up + mu[i + 1] * down) * scale;
            (i, i + 1, c)
        })
        .collect();
    GeneratorSpec::from_edges(mu.to_vec(), edges, FormMode::RateMatrix)
}

/// Integrator used by [`heat_flow_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMethod {
    /// Uniformization up to [`EXPONENTIAL_ACTION_MAX_N`], ODE above.
    Auto,
    Uniformization,
    RungeKutta,
}

/// `P_t h₀`, with the method chosen by size.
pub fn heat_flow(gen: &GeneratorSpec, h0: &Density, t: f64, tol: f64) -> Result<Density> {
    heat_flow_with(gen, h0, t, tol, FlowMethod::Auto)
}

pub fn heat_flow_with(gen: &GeneratorSpec, h0: &Density, t: f64, tol: f64, method: FlowMethod) -> Result<Density> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid("t", format!("need t ≥ 0, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if h0.len() != gen.n() {
        return Err(Error::Dimension {
            expected: gen.n(),
            got: h0.len(),
        });
    }
    let method = match method {
        FlowMethod::Auto if gen.n() <= EXPONENTIAL_ACTION_MAX_N => FlowMethod::Uniformization,
        FlowMethod::Auto => FlowMethod::RungeKutta,
        m => m,
    };
    let h = match method {
        FlowMethod::RungeKutta => runge_kutta(gen, h0.h(), t, tol)?,
        _ => uniformization(gen, h0.h(), t, tol),
    };
    let mass: f64 = gen.mu.iter().zip(&h).map(|(m, x)| m * x).sum();
    if (mass - 1.0).abs() > 1e-10 {
        return Err(Error::NotConverged {
            iterations: 0,
            residual: (mass - 1.0).abs(),
        });
    }
    Ok(Density::from_raw(h))
}

fn uniformization(gen: &GeneratorSpec, h0: &[f64], t: f64, tol: f64) -> Vec<f64> {
    let lambda = gen.max_rate();
    let mut h = h0.to_vec();
    if t == 0.0 || lambda == 0.0 {
        return h;
    }
    let total = lambda * t;
    let steps = (total / STEP_MEAN).ceil().max(1.0) as usize;
    let mean = total / steps as f64;
    let step_tol = tol / steps as f64;
    let weights = poisson_weights(mean, step_tol);
    let norm: f64 = weights.iter().sum();
    let n = gen.n();
    let (mut cur, mut next, mut qh) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut acc = vec![0.0; n];
    for _ in 0..steps {
        cur.copy_from_slice(&h);
        acc.iter_mut().zip(&cur).for_each(|(a, c)| *a = weights[0] * c);
        for w in &weights[1..] {
            gen.apply(&cur, &mut qh);
            for i in 0..n {
                next[i] = cur[i] + qh[i] / lambda;
            }
            core::mem::swap(&mut cur, &mut next);
            acc.iter_mut().zip(&cur).for_each(|(a, c)| *a += w * c);
        }
        h.iter_mut().zip(&acc).for_each(|(x, a)| *x = (a / norm).max(0.0));
    }
    h
}

/// Poisson(mean) probabilities from `k = 0` until the tail is below `tol`.
fn poisson_weights(mean: f64, tol: f64) -> Vec<f64> {
    let mut w = vec![(-mean).exp()];
    let mut cum = w[0];
    let mut k = 0.0;
    while 1.0 - cum > tol && w.len() < 100_000 {
        k += 1.0;
        let next = w[w.len() - 1] * mean / k;
        // past the mode the weights only shrink; stop once they underflow
        if next == 0.0 && k > mean {
            break;
        }
        cum += next;
        w.push(next);
    }
    w
}

/// Dormand–Prince 5(4) with an elementary step-size controller; the
/// autonomous system needs no stage times.
fn runge_kutta(gen: &GeneratorSpec, h0: &[f64], t: f64, tol: f64) -> Result<Vec<f64>> {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let n = gen.n();
    let mut h = h0.to_vec();
    if t == 0.0 {
        return Ok(h);
    }
    let lambda = gen.max_rate().max(1e-300);
    let mut dt = (1.0 / lambda).min(t);
    let mut now = 0.0;
    let mut k = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut steps = 0usize;
    let scale = h.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    while now < t {
        if steps > 50_000_000 {
            return Err(Error::NotConverged {
                iterations: steps,
                residual: t - now,
            });
        }
        let step = dt.min(t - now);
        gen.apply(&h, &mut k[0]);
        for s in 1..7 {
            for i in 0..n {
                stage[i] = h[i] + step * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            gen.apply(&stage, &mut k[s]);
        }
        let mut err = 0.0f64;
        let mut candidate = vec![0.0; n];
        for i in 0..n {
            let hi5 = h[i] + step * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>();
            let hi4 = h[i] + step * (0..7).map(|j| B4[j] * k[j][i]).sum::<f64>();
            err = err.max((hi5 - hi4).abs());
            candidate[i] = hi5;
        }
        let local_tol = tol * scale * step / t;
        steps += 1;
        if err <= local_tol || step < 1e-14 * t {
            now += step;
            h = candidate;
        }
        let factor = if err == 0.0 { 5.0 } else { 0.9 * (local_tol / err).powf(0.2) };
        dt = step * factor.clamp(0.2, 5.0);
        if dt < 1e-15 * t {
            return Err(Error::NotConverged {
                iterations: steps,
                residual: err,
            });
        }
    }
    // explicit steps can leave rounding-level negatives; remove them and
    // restore the mass they carried
    let neg: f64 = gen.mu.iter().zip(&h).filter(|(_, x)| **x < 0.0).map(|(m, x)| m * x).sum();
    if neg < 0.0 {
        h.iter_mut().for_each(|x| *x = x.max(0.0));
        let mass: f64 = gen.mu.iter().zip(&h).map(|(m, x)| m * x).sum();
        h.iter_mut().for_each(|x| *x /= mass);
    }
    Ok(h)
}

/// Quantity recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceQuantity {
    Entropy,
    PNorm,
    W2,
    DirichletOfSqrt,
}

impl TraceQuantity {
    pub fn name(self) -> &'static str {
        match self {
            Self::Entropy => "entropy",
            Self::PNorm => "pnorm",
            Self::W2 => "w2",
            Self::DirichletOfSqrt => "dirichlet_sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub quantity: TraceQuantity,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl FlowTrace {
    /// Largest increase between consecutive values (0 if nonincreasing).
    pub fn max_increase(&self) -> f64 {
        self.values.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Largest decrease between consecutive values (0 if nondecreasing).
    pub fn max_decrease(&self) -> f64 {
        self.values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(invalid("times", "empty time grid"));
    }
    if times[0] < 0.0 || times.iter().any(|t| !t.is_finite()) {
        return Err(invalid("times", "times must be finite and ≥ 0"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("times", "times must be strictly increasing"));
    }
    Ok(())
}

/// `P_t h₀` at every requested time, propagating from one time to the next.
pub fn flow_states(gen: &GeneratorSpec, h0: &Density, times: &[f64], tol: f64) -> Result<Vec<Density>> {
    check_times(times)?;
    let mut out = Vec::with_capacity(times.len());
    let mut prev_t = 0.0;
    let mut cur = h0.clone();
    for &t in times {
        cur = heat_flow(gen, &cur, t - prev_t, tol / times.len() as f64)?;
        prev_t = t;
        out.push(cur.clone());
    }
    Ok(out)
}

/// `(∫(P_t h)^{p/2} dμ)^{1/p}` along the flow, with the largest value of
/// `∫(P_t h)^{p/2} dμ` seen (it stays at most 1).
pub fn p_norm_trace(gen: &GeneratorSpec, h0: &Density, p: f64, times: &[f64], tol: f64) -> Result<(FlowTrace, f64)> {
    if !(1.0..2.0).contains(&p) {
        return Err(invalid("p", format!("{p} outside [1, 2)")));
    }
    let states = flow_states(gen, h0, times, tol)?;
    let mut max_moment = 0.0f64;
    let values = states
        .iter()
        .map(|s| {
            let m = half_power_moment(&gen.mu, s.h(), p);
            max_moment = max_moment.max(m);
            m.powf(1.0 / p)
        })
        .collect();
    Ok((
        FlowTrace {
            quantity: TraceQuantity::PNorm,
            times: times.to_vec(),
            values,
        },
        max_moment,
    ))
}

pub(crate) fn half_power_moment(mu: &[f64], h: &[f64], p: f64) -> f64 {
    mu.iter()
        .zip(h)
        .filter(|(_, x)| **x > 0.0)
        .map(|(m, x)| m * x.powf(0.5 * p))
        .sum()
}

/// `H(μ_t, μ)` along the flow.
pub fn entropy_trace(gen: &GeneratorSpec, h0: &Density, times: &[f64], tol: f64) -> Result<FlowTrace> {
    let states = flow_states(gen, h0, times, tol)?;
    Ok(FlowTrace {
        quantity: TraceQuantity::Entropy,
        times: times.to_vec(),
        values: states.iter().map(|s| entropy_of(&gen.mu, s.h())).collect(),
    })
}

/// `W₂(μ_t, μ)` along the flow, the energy `E(√P_t h, √P_t h)` and the
/// ratio of the finite-difference decay rate of `W₂` to `2 √E`.
#[derive(Debug, Clone, PartialEq)]
pub struct W2Flow {
    pub w2: FlowTrace,
    pub energy: FlowTrace,
    /// Per interval `[t_k, t_{k+1}]`: `-(ΔW₂/Δt) / (2 √E(t_k))`; `NaN` where
    /// the energy vanishes.
    pub derivative_ratio: Vec<f64>,
}

pub fn w2_flow_trace(
    gen: &GeneratorSpec,
    space: &MetricMeasureSpace,
    h0: &Density,
    times: &[f64],
    tol: f64,
) -> Result<W2Flow> {
    if space.n() != gen.n() {
        return Err(Error::Dimension {
            expected: gen.n(),
            got: space.n(),
        });
    }
    let states = flow_states(gen, h0, times, tol)?;
    let form = gen.dirichlet_form();
    let mut w2 = Vec::with_capacity(states.len());
    let mut energy = Vec::with_capacity(states.len());
    for s in &states {
        w2.push(wasserstein_pow(space, s, 2.0)?.max(0.0).sqrt());
        let root: Vec<f64> = s.h().iter().map(|x| x.sqrt()).collect();
        energy.push(form.energy(&root));
    }
    let derivative_ratio = (0..states.len().saturating_sub(1))
        .map(|k| {
            let rate = -(w2[k + 1] - w2[k]) / (times[k + 1] - times[k]);
            let bound = 2.0 * energy[k].sqrt();
            if bound > 0.0 {
                rate / bound
            } else {
                f64::NAN
            }
        })
        .collect();
    Ok(W2Flow {
        w2: FlowTrace {
            quantity: TraceQuantity::W2,
            times: times.to_vec(),
            values: w2,
        },
        energy: FlowTrace {
            quantity: TraceQuantity::DirichletOfSqrt,
            times: times.to_vec(),
            values: energy,
        },
        derivative_ratio,
    })
}

/// `count` geometrically spaced times over `[1e-3 C_P, 20 C_P]`.
pub fn geometric_times(poincare: f64, count: usize) -> Result<Vec<f64>> {
    if !(poincare > 0.0 && poincare.is_finite()) {
        return Err(invalid("C_P", format!("need a positive constant, got {poincare}")));
    }
    if count < 2 {
        return Err(invalid("count", "need at least two times"));
    }
    let (lo, hi) = (1e-3 * poincare, 20.0 * poincare);
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    let mut t: Vec<f64> = (0..count).map(|k| lo * (ratio * k as f64).exp()).collect();
    t[count - 1] = hi;
    Ok(t)
}
