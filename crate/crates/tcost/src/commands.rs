//! Single-shot computations behind the CLI commands. Each returns a
//! serializable record; the binary only parses flags and prints.

use serde::Serialize;
use tcost_core::dirichlet::{poincare_constant, DirichletForm};
use tcost_core::entropy::relative_entropy;
use tcost_core::orlicz::{gauge_norm, Reference, YoungFunction};
use tcost_core::semigroup::{
    entropy_trace, geometric_times, metropolis_generator, p_norm_trace, w2_flow_trace, GeneratorSpec,
};
use tcost_core::transport::{dual_certificate, solve_entropic, solve_exact, EntropicOptions};
use tcost_core::{Density, MetricMeasureSpace};

use crate::error::{CliError, CliResult};
use crate::suite::{default_form, number};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Entropic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WassersteinOut {
    pub method: &'static str,
    pub p: f64,
    /// `W_p^p` (exact) or the cost of the regularized plan (entropic).
    pub cost: f64,
    /// `cost^{1/p}`.
    pub wp: f64,
    /// Exact: primal minus dual value. Entropic: plan cost minus exact cost.
    pub gap: f64,
    /// Simplex pivots or Sinkhorn sweeps.
    pub iters: usize,
    /// Largest marginal deviation of the returned plan.
    pub marginal_residual: f64,
}

/// `W_p` from `source` to `target` (both densities against μ).
pub fn wasserstein(
    space: &MetricMeasureSpace,
    source: &Density,
    target: &Density,
    p: f64,
    method: Method,
    opts: EntropicOptions,
) -> CliResult<WassersteinOut> {
    let (a, b) = (source.weights(space), target.weights(space));
    let exact = solve_exact(space, &a, &b, p)?;
    let (name, plan, gap) = match method {
        Method::Exact => {
            let dual = dual_certificate(space, &a, &b, p)?;
            ("exact", exact, dual.gap)
        }
        Method::Entropic => {
            let plan = solve_entropic(space, &a, &b, p, opts)?;
            let gap = plan.cost - exact.cost;
            ("entropic", plan, gap)
        }
    };
    Ok(WassersteinOut {
        method: name,
        p,
        cost: plan.cost,
        wp: plan.distance(),
        gap,
        iters: plan.iterations,
        marginal_residual: plan.marginal_residual(&a, &b),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Value {
    pub value: f64,
}

pub fn entropy(space: &MetricMeasureSpace, nu: &Density) -> Value {
    Value {
        value: relative_entropy(space, nu),
    }
}

/// What the gauge norm is taken of.
#[derive(Debug, Clone, PartialEq)]
pub enum GaugeInput {
    /// `d^p`: to the base point, or between the two coordinates on `μ⊗μ`.
    DistancePower(f64),
    /// Explicit values, `n` (or `n²` row-major on `μ⊗μ`).
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrliczOut {
    pub value: f64,
    pub psi: &'static str,
    pub product: bool,
}

pub fn orlicz_norm(space: &MetricMeasureSpace, g: &GaugeInput, psi: YoungFunction, product: bool) -> CliResult<OrliczOut> {
    let values = match g {
        GaugeInput::DistancePower(p) if product => space.cost_matrix(*p),
        GaugeInput::DistancePower(p) => space.dist_to_base_pow(*p),
        GaugeInput::Values(v) => v.clone(),
    };
    let reference = if product {
        Reference::Product(space.mu())
    } else {
        Reference::Measure(space.mu())
    };
    let n = gauge_norm(&values, psi, reference)?;
    Ok(OrliczOut {
        value: n.value,
        psi: psi.name(),
        product,
    })
}

/// The reversible structure used by `poincare` and `flow`: Metropolis rates
/// when a potential is given, the default form of the space otherwise.
pub fn generator(space: &MetricMeasureSpace, potential: Option<&[f64]>) -> CliResult<GeneratorSpec> {
    match potential {
        Some(v) => Ok(metropolis_generator(space, v)?),
        None => Ok(GeneratorSpec::from_form(&default_form(space)?)?),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoincareOut {
    pub value: f64,
    pub gap: f64,
    pub form: &'static str,
}

pub fn poincare(space: &MetricMeasureSpace, potential: Option<&[f64]>) -> CliResult<PoincareOut> {
    let form: DirichletForm = generator(space, potential)?.dirichlet_form();
    let c = poincare_constant(&form)?;
    Ok(PoincareOut {
        value: c.value,
        gap: c.gap,
        form: if potential.is_some() { "metropolis" } else { "default" },
    })
}

/// Time grid: `geometric:N` (over `[1e-3 C_P, 20 C_P]`) or a comma list.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeSpec {
    Geometric(usize),
    List(Vec<f64>),
}

impl std::str::FromStr for TimeSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = |why: String| CliError::parameter("times", why);
        if let Some(count) = s.strip_prefix("geometric:") {
            let n = count.parse().map_err(|_| bad(format!("bad count `{count}`")))?;
            return Ok(TimeSpec::Geometric(n));
        }
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad(format!("bad time `{t}`"))))
            .collect::<CliResult<_>>()
            .map(TimeSpec::List)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trace {
    Entropy,
    PNorm,
    W2,
}

impl std::str::FromStr for Trace {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "entropy" => Ok(Trace::Entropy),
            "pnorm" => Ok(Trace::PNorm),
            "w2" => Ok(Trace::W2),
            _ => Err(CliError::parameter("trace", format!("unknown trace `{s}` (known: entropy, pnorm, w2)"))),
        }
    }
}

/// Traces along one trajectory with the monotonicity verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowOut {
    pub columns: Vec<&'static str>,
    /// One row per time; the first column is the time.
    pub rows: Vec<Vec<f64>>,
    /// Monotonicity failures beyond tolerance, one message each.
    pub violations: Vec<String>,
}

/// Slack on `W₂` monotonicity; exact transport at every time makes this
/// independent of the integration tolerance.
pub const W2_MONOTONE_SLACK: f64 = 1e-6;

pub fn flow(
    space: &MetricMeasureSpace,
    potential: Option<&[f64]>,
    h0: &Density,
    traces: &[Trace],
    p: f64,
    times: &TimeSpec,
    tol: f64,
) -> CliResult<FlowOut> {
    if traces.is_empty() {
        return Err(CliError::parameter("trace", "no trace requested"));
    }
    let gen = generator(space, potential)?;
    let times = match times {
        TimeSpec::Geometric(n) => {
            let cp = poincare_constant(&gen.dirichlet_form())?.value;
            geometric_times(cp, *n)?
        }
        TimeSpec::List(t) => t.clone(),
    };
    let mut columns = vec!["time"];
    let mut cols: Vec<Vec<f64>> = Vec::new();
    let mut violations = Vec::new();
    for trace in traces {
        match trace {
            Trace::Entropy => {
                let t = entropy_trace(&gen, h0, &times, tol)?;
                if t.max_increase() > 10.0 * tol {
                    violations.push(format!("entropy increased by {:e}", t.max_increase()));
                }
                columns.push("entropy");
                cols.push(t.values);
            }
            Trace::PNorm => {
                let (t, moment) = p_norm_trace(&gen, h0, p, &times, tol)?;
                if t.max_decrease() > 10.0 * tol {
                    violations.push(format!("p-norm decreased by {:e}", t.max_decrease()));
                }
                if moment > 1.0 + 10.0 * tol {
                    violations.push(format!("half-power moment {moment} exceeds 1"));
                }
                columns.push("pnorm");
                cols.push(t.values);
            }
            Trace::W2 => {
                let w = w2_flow_trace(&gen, space, h0, &times, tol)?;
                if w.w2.max_increase() > W2_MONOTONE_SLACK {
                    violations.push(format!("W2 increased by {:e}", w.w2.max_increase()));
                }
                columns.extend(["w2", "dirichlet_sqrt", "derivative_ratio"]);
                let mut ratio = w.derivative_ratio;
                ratio.push(f64::NAN);
                cols.extend([w.w2.values, w.energy.values, ratio]);
            }
        }
    }
    let rows = times
        .iter()
        .enumerate()
        .map(|(k, &t)| std::iter::once(t).chain(cols.iter().map(|c| c[k])).collect())
        .collect();
    Ok(FlowOut {
        columns,
        rows,
        violations,
    })
}

impl FlowOut {
    pub fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(|x| number(*x))).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}
