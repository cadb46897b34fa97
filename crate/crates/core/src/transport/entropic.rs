use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use super::{check_exponent, restrict, TransportPlan};
use crate::error::{invalid, Error, Result};
use crate::space::{check_weights, pow_dist, MetricMeasureSpace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropicOptions {
    /// Regularization strength, in units of `d^p`.
    pub eps_reg: f64,
    /// Stop when the largest marginal violation falls below this.
    pub tol: f64,
    /// Total Sinkhorn sweeps allowed across all ε stages.
    pub max_iter: usize,
}

impl Default for EntropicOptions {
    fn default() -> Self {
        Self {
            eps_reg: 1e-2,
            tol: 1e-9,
            max_iter: 200_000,
        }
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let top = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return top;
    }
    top + values.map(|v| (v - top).exp()).sum::<f64>().ln()
}

/// Entropically regularized coupling computed by log-domain Sinkhorn
/// iterations, warm-started through a geometric ε schedule that starts at
/// the largest cost and halves down to `eps_reg`.
///
/// Returns [`Error::NotConverged`] with the final marginal violation when
/// `max_iter` sweeps are exhausted.
pub fn solve_entropic(
    space: &MetricMeasureSpace,
    source: &[f64],
    target: &[f64],
    p: f64,
    opts: EntropicOptions,
) -> Result<TransportPlan> {
    check_exponent(p)?;
    if !(opts.eps_reg > 0.0 && opts.eps_reg.is_finite()) {
        return Err(invalid("eps_reg", format!("must be positive, got {}", opts.eps_reg)));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let n = space.n();
    check_weights("source", source, n)?;
    check_weights("target", target, n)?;
    let r = restrict(source, target);
    let (m, k) = (r.rows.len(), r.cols.len());
    let mut cost = Vec::with_capacity(m * k);
    for &i in &r.rows {
        for &j in &r.cols {
            cost.push(pow_dist(space.dist(i, j), p));
        }
    }
    let log_a: Vec<f64> = r.supply.iter().map(|x| x.ln()).collect();
    let log_b: Vec<f64> = r.demand.iter().map(|x| x.ln()).collect();
    let cmax = cost.iter().fold(0.0f64, |acc, c| acc.max(*c));

    let mut schedule = Vec::new();
    let mut eps = cmax.max(opts.eps_reg);
    while eps > opts.eps_reg {
        schedule.push(eps);
        eps *= 0.5;
    }
    schedule.push(opts.eps_reg);

    let mut f = vec![0.0; m];
    let mut g = vec![0.0; k];
    let mut sweeps = 0usize;
    let mut residual = f64::INFINITY;
    let last = schedule.len() - 1;
    for (stage, &eps) in schedule.iter().enumerate() {
        let stage_tol = if stage == last { opts.tol } else { opts.tol.sqrt().max(1e-6) };
        loop {
            if sweeps >= opts.max_iter {
                return Err(Error::NotConverged {
                    iterations: sweeps,
                    residual,
                });
            }
            for a in 0..m {
                let row = &cost[a * k..(a + 1) * k];
                f[a] = -eps
                    * log_sum_exp((0..k).map(|b| log_b[b] + (g[b] - row[b]) / eps));
            }
            for b in 0..k {
                g[b] = -eps
                    * log_sum_exp((0..m).map(|a| log_a[a] + (f[a] - cost[a * k + b]) / eps));
            }
            sweeps += 1;
            residual = 0.0;
            for a in 0..m {
                let row = &cost[a * k..(a + 1) * k];
                let mass: f64 = (0..k)
                    .map(|b| (log_a[a] + log_b[b] + (f[a] + g[b] - row[b]) / eps).exp())
                    .sum();
                residual = residual.max((mass - r.supply[a]).abs());
            }
            if residual <= stage_tol {
                break;
            }
        }
    }

    let eps = opts.eps_reg;
    let mut entries = Vec::with_capacity(m * k);
    let mut total = 0.0;
    for a in 0..m {
        for b in 0..k {
            let c = cost[a * k + b];
            let mass = (log_a[a] + log_b[b] + (f[a] + g[b] - c) / eps).exp();
            if mass > 0.0 {
                entries.push((r.rows[a], r.cols[b], mass));
                total += mass * c;
            }
        }
    }
    Ok(TransportPlan {
        n,
        entries,
        cost: total,
        p,
        iterations: sweeps,
    })
}
