//! Suite orchestration: evaluate every requested check on every member,
//! then reduce to per-check counts, worst margins and estimated constants.
//!
//! | Suite | Reports per member | Kind |
//! |-------|--------------------|------|
//! | `truncation-entropy` | `truncation.tail-entropy`, `truncation.level-mass` | assertion |
//! | `truncated-entropy` | `truncated-entropy` | assertion |
//! | `power-entropy` | `power-entropy`, one per exponent in `p_grid` | assertion |
//! | `truncation-transport` | `truncation-transport`, `mass-transport` | assertion |
//! | `tronc` | `tronc`: `W₂²(ν_a, ν) ≤ C H` | diagnostic |
//! | `varent` | `varent`: `∫d² 1_{h>a} dν ≤ C H` | diagnostic |
//! | `bounded-density` | `bounded-density` | diagnostic |
//! | `small-entropy` | `.truncated`, `.log` (diagnostic); `.level-mass`, `.level-mass-rigorous` | mixed |
//! | `t2` | `t2`: `W₂² ≤ 2 C H` | diagnostic |
//! | `holder-orlicz` | `holder-orlicz` with `f = h`, `g = d^p(·, x₀)` | assertion |
//! | `gauge-bound` | `gauge-bound.tau` on `h`, `gauge-bound.tau-star` on `d^p(·, x₀)` | assertion |
//! | `hlogplus` | `hlogplus` | assertion |
//! | `large-entropy` | `large-entropy`, `large-entropy.hlogplus` | assertion |
//! | `concentration` | one per radius, no member | diagnostic |
//! | `young` | one per point of a `[0, 10]²` grid, no member | assertion |
//!
//! Members are evaluated in parallel; results are collected in member order,
//! so thread count never changes an emitted number.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use tcost_core::dirichlet::{lo_alpha_value, poincare_constant, DirichletForm};
use tcost_core::entropy::{distance_norm, h_log_plus_check, large_entropy_bound_with_norm, relative_entropy};
use tcost_core::inequalities::{
    bounded_density_check, concentration_check, mass_transport_check, power_entropy_check, small_entropy_check,
    tronc_functional, truncated_entropy_check, truncation_entropy_check, truncation_transport_check, var_ent_functional,
    young_check,
};
use tcost_core::orlicz::{Reference, YoungFunction};
use tcost_core::report::{CheckKind, InequalityReport, Params, Status};
use tcost_core::transport::wasserstein_pow;
use tcost_core::{Density, Error as CoreError, MetricMeasureSpace};

use crate::config::{Parameters, RunConfig, Suite};
use crate::error::CliResult;

/// Default Dirichlet form of a space: the finite-difference gradient on a
/// grid, and conductances `μ_i μ_j / d_ij²` between every pair otherwise.
pub fn default_form(space: &MetricMeasureSpace) -> CliResult<DirichletForm> {
    if space.grid().is_some() {
        return Ok(DirichletForm::grid_gradient(space)?);
    }
    let n = space.n();
    let mu = space.mu();
    let mut rates = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = space.dist(i, j);
            if i != j && d > 0.0 {
                rates[i * n + j] = mu[j] / (d * d);
            }
        }
    }
    Ok(DirichletForm::from_rates(mu, &rates)?)
}

/// Nodes of the reference set for concentration: the left half of a grid up
/// to the μ-median node, otherwise the smallest ball around `x₀` of mass at
/// least 1/2.
pub fn half_space(space: &MetricMeasureSpace) -> Vec<usize> {
    let mu = space.mu();
    if space.grid().is_some() {
        let mut acc = 0.0;
        let mut set = Vec::new();
        for (i, m) in mu.iter().enumerate() {
            set.push(i);
            acc += m;
            if acc >= 0.5 {
                break;
            }
        }
        return set;
    }
    let x0 = space.x0();
    let mut order: Vec<usize> = (0..space.n()).collect();
    order.sort_by(|&a, &b| space.dist(a, x0).total_cmp(&space.dist(b, x0)).then(a.cmp(&b)));
    let mut acc = 0.0;
    let mut radius = 0.0;
    for &i in &order {
        acc += mu[i];
        radius = space.dist(i, x0);
        if acc >= 0.5 {
            break;
        }
    }
    (0..space.n()).filter(|&i| space.dist(i, x0) <= radius).collect()
}

/// Constants estimated from the run. Every value is a family supremum, hence
/// a lower bound on the true constant.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Constants {
    /// Poincaré constant of the default form (exact eigensolve).
    #[serde(rename = "C_P", skip_serializing_if = "Option::is_none")]
    pub poincare: Option<f64>,
    /// `I(α)` ratio supremum over the Poincaré witness and `√h` of members.
    #[serde(rename = "C_alpha", skip_serializing_if = "Option::is_none")]
    pub lo_alpha: Option<f64>,
    /// Supremum of `W₂²/(2H)`.
    #[serde(rename = "T2_lower_bound", skip_serializing_if = "Option::is_none")]
    pub t2: Option<Estimate>,
    /// Supremum of `W₂²(ν_a, ν)/H` over `H ≤ 1/2`.
    #[serde(rename = "c_a", skip_serializing_if = "Option::is_none")]
    pub tronc: Option<Estimate>,
    /// Supremum of `∫d² 1_{h>a} dν / H` over `H ≤ 1/2`.
    #[serde(rename = "D_a", skip_serializing_if = "Option::is_none")]
    pub var_ent: Option<Estimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub argmax: usize,
}

fn sup_estimate(values: impl IntoIterator<Item = (usize, f64)>) -> Option<Estimate> {
    values.into_iter().fold(None, |best, (k, v)| match best {
        Some(Estimate { value, .. }) if value >= v => best,
        _ => Some(Estimate { value: v, argmax: k }),
    })
}

/// Serializable mirror of [`Params`]; unset entries are omitted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ParamsOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl From<Params> for ParamsOut {
    fn from(p: Params) -> Self {
        Self {
            a: p.a,
            p: p.p,
            alpha: p.alpha,
            k: p.k,
            q: p.q,
            c: p.c,
            r: p.r,
        }
    }
}

impl ParamsOut {
    /// `key=value` pairs joined by `;`, numbers formatted as in the JSON
    /// report.
    pub fn label(&self) -> String {
        let fields = [
            ("a", self.a),
            ("p", self.p),
            ("alpha", self.alpha),
            ("K", self.k),
            ("q", self.q),
            ("C", self.c),
            ("r", self.r),
        ];
        fields
            .iter()
            .filter_map(|(k, v)| v.map(|v| format!("{k}={}", number(v))))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parameters a check is configured with; the member-dependent level `K`
    /// is dropped so all members of one check share a key.
    fn fixed(mut self) -> Self {
        self.k = None;
        self
    }
}

/// JSON spelling of a number; empty for non-finite values, which the JSON
/// report writes as `null`.
pub fn number(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite f64 serializes")
    } else {
        String::new()
    }
}

/// Counts and worst margin of one check over all its evaluations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub kind: &'static str,
    pub params: ParamsOut,
    pub passed: usize,
    pub failed: usize,
    pub out_of_domain: usize,
    /// Smallest in-domain margin; `null` when nothing was in domain.
    pub min_margin: Option<f64>,
    /// Witness of the smallest margin (member or grid-point index).
    pub argmin_witness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub members: usize,
    pub evaluations: usize,
    pub passed: usize,
    pub failed: usize,
    pub out_of_domain: usize,
    /// Failed assertions; a run exits nonzero iff this is positive.
    pub violations: usize,
    pub checks: Vec<CheckSummary>,
    pub constants: Constants,
}

/// A numeric table written as CSV next to the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotTable {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRun {
    pub reports: Vec<InequalityReport>,
    pub summary: SuiteSummary,
    pub plots: Vec<PlotTable>,
}

fn kind_name(kind: CheckKind) -> &'static str {
    match kind {
        CheckKind::Assertion => "assertion",
        CheckKind::Diagnostic => "diagnostic",
    }
}

/// Reduces reports to per-check summaries, in first-appearance order.
pub fn summarize(reports: &[InequalityReport], members: usize, constants: Constants) -> SuiteSummary {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), CheckSummary> = BTreeMap::new();
    for r in reports {
        let params = ParamsOut::from(r.params).fixed();
        let key = (r.name.clone(), params.label());
        let entry = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            CheckSummary {
                name: r.name.clone(),
                kind: kind_name(r.kind),
                params,
                passed: 0,
                failed: 0,
                out_of_domain: 0,
                min_margin: None,
                argmin_witness: None,
            }
        });
        match r.status() {
            Status::Pass => entry.passed += 1,
            Status::Fail => entry.failed += 1,
            Status::OutOfDomain => entry.out_of_domain += 1,
        }
        if r.in_domain && !r.margin.is_nan() && entry.min_margin.map_or(true, |m| r.margin < m) {
            entry.min_margin = Some(r.margin);
            entry.argmin_witness = r.witness;
        }
    }
    let checks: Vec<CheckSummary> = order.iter().map(|k| groups.remove(k).expect("key recorded")).collect();
    SuiteSummary {
        members,
        evaluations: reports.len(),
        passed: checks.iter().map(|c| c.passed).sum(),
        failed: checks.iter().map(|c| c.failed).sum(),
        out_of_domain: checks.iter().map(|c| c.out_of_domain).sum(),
        violations: reports.iter().filter(|r| r.is_violation()).count(),
        checks,
        constants,
    }
}

/// Quantities computed once per run and shared by every member.
struct Shared {
    distance_norm: Option<f64>,
    c_alpha: Option<f64>,
}

fn out_of_domain_on_undefined<T>(r: Result<T, CoreError>) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(CoreError::Undefined(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Diagnostic `lhs ≤ C H` from a functional value `lhs / H`.
fn ratio_report(name: &str, value: Option<f64>, h: f64, params: &Parameters) -> InequalityReport {
    let p = Params {
        a: Some(params.a),
        c: Some(params.c),
        ..Params::default()
    };
    match value {
        Some(v) => InequalityReport::new(name, v * h, params.c * h, CheckKind::Diagnostic, 0.0).with_params(p),
        None => InequalityReport::out_of_domain(name, CheckKind::Diagnostic).with_params(p),
    }
}

/// Per-member evaluation. Returns the reports and an optional plot row.
fn member_reports(
    suite: Suite,
    space: &MetricMeasureSpace,
    nu: &Density,
    params: &Parameters,
    shared: &Shared,
) -> CliResult<(Vec<InequalityReport>, Option<Vec<f64>>)> {
    let mut row = None;
    let reports = match suite {
        Suite::TruncationEntropy => truncation_entropy_check(space, nu, params.a)?.to_vec(),
        Suite::TruncatedEntropy => vec![truncated_entropy_check(space, nu, params.a)?],
        Suite::PowerEntropy => params
            .p_grid
            .iter()
            .map(|&p| power_entropy_check(space, nu, p))
            .collect::<Result<_, _>>()?,
        Suite::TruncationTransport => vec![
            truncation_transport_check(space, nu, params.a)?,
            mass_transport_check(space, nu, params.a)?,
        ],
        Suite::Tronc => {
            let h = relative_entropy(space, nu);
            let v = out_of_domain_on_undefined(tronc_functional(space, nu, params.a))?;
            vec![ratio_report("tronc", v, h, params)]
        }
        Suite::Varent => {
            let h = relative_entropy(space, nu);
            let v = out_of_domain_on_undefined(var_ent_functional(space, nu, params.a))?;
            vec![ratio_report("varent", v, h, params)]
        }
        Suite::BoundedDensity => {
            let c = shared.c_alpha.expect("computed before the sweep");
            vec![bounded_density_check(space, nu, params.alpha, c)?]
        }
        Suite::SmallEntropy => {
            let s = small_entropy_check(space, nu, params.a, params.q, params.c)?;
            if let Some(fitted) = s.fitted_log {
                let h = s.entropy;
                row = Some(vec![
                    h,
                    s.w2sq,
                    s.w2sq / h,
                    1.0 + (1.0 / h).ln().max(0.0).sqrt(),
                    fitted,
                    s.fitted_truncated.unwrap_or(f64::NAN),
                ]);
            }
            vec![s.truncated, s.logarithmic, s.level_mass, s.level_mass_rigorous]
        }
        Suite::T2 => {
            let h = relative_entropy(space, nu);
            let p = Params {
                p: Some(2.0),
                c: Some(params.c),
                ..Params::default()
            };
            if h > 0.0 {
                let w = wasserstein_pow(space, nu, 2.0)?;
                row = Some(vec![h, w, w / (2.0 * h)]);
                vec![InequalityReport::new("t2", w, 2.0 * params.c * h, CheckKind::Diagnostic, 0.0).with_params(p)]
            } else {
                vec![InequalityReport::out_of_domain("t2", CheckKind::Diagnostic).with_params(p)]
            }
        }
        Suite::HolderOrlicz => {
            let g = space.dist_to_base_pow(params.p);
            let r = tcost_core::inequalities::holder_orlicz_report(nu.h(), &g, Reference::Measure(space.mu()))?;
            vec![r.with_params(Params {
                p: Some(params.p),
                ..Params::default()
            })]
        }
        Suite::GaugeBound => {
            let reference = Reference::Measure(space.mu());
            let mut tau = tcost_core::inequalities::gauge_bound_check(nu.h(), YoungFunction::Tau, reference)?;
            tau.name = "gauge-bound.tau".into();
            let g = space.dist_to_base_pow(params.p);
            let mut star = tcost_core::inequalities::gauge_bound_check(&g, YoungFunction::TauStar, reference)?;
            star.name = "gauge-bound.tau-star".into();
            star.params.p = Some(params.p);
            vec![tau, star]
        }
        Suite::Hlogplus => vec![h_log_plus_check(space, nu)],
        Suite::LargeEntropy => {
            let norm = shared.distance_norm.expect("computed before the sweep");
            let b = large_entropy_bound_with_norm(space, nu, params.p, norm)?;
            vec![b.report, b.intermediate]
        }
        Suite::Concentration | Suite::Young => unreachable!("not a per-member suite"),
    };
    Ok((reports, row))
}

/// Points of the Young grid: `side²` pairs `(u, v)` on `[0, 10]²`.
pub fn young_grid(side: usize) -> Vec<(f64, f64)> {
    let step = if side > 1 { 10.0 / (side - 1) as f64 } else { 0.0 };
    (0..side * side)
        .map(|k| ((k / side) as f64 * step, (k % side) as f64 * step))
        .collect()
}

fn young_side(points: usize) -> usize {
    (1..).find(|s| s * s >= points).expect("unbounded search")
}

/// Runs every suite of `config` on `space` and `members`.
pub fn run_suites(
    config: &RunConfig,
    space: &MetricMeasureSpace,
    members: &[Density],
) -> CliResult<SuiteRun> {
    config.validate()?;
    let params = &config.params;
    let needs = |s: Suite| config.suites.contains(&s);
    let mut constants = Constants::default();

    let distance_norm = if needs(Suite::LargeEntropy) {
        Some(distance_norm(space, params.p)?.value)
    } else {
        None
    };
    let c_alpha = if needs(Suite::BoundedDensity) {
        let form = default_form(space)?;
        let cp = poincare_constant(&form)?;
        constants.poincare = Some(cp.value);
        let estimate = match params.c_alpha {
            Some(c) => c,
            None => {
                // the ratio sees |f|, so the eigenfunction also enters shifted to be
                // nonnegative, where the p = 1 term is Var(f)
                let low = cp.witness.iter().cloned().fold(f64::INFINITY, f64::min);
                let shifted: Vec<f64> = cp.witness.iter().map(|x| x - low).collect();
                let mut tests = vec![cp.witness.clone(), shifted];
                tests.extend(members.iter().map(|d| d.h().iter().map(|x| x.sqrt()).collect()));
                let mut best = f64::NEG_INFINITY;
                for f in &tests {
                    if let Some(v) = out_of_domain_on_undefined(lo_alpha_value(&form, f, params.alpha))? {
                        best = best.max(v);
                    }
                }
                constants.lo_alpha = Some(best);
                best
            }
        };
        Some(estimate)
    } else {
        None
    };
    let shared = Shared {
        distance_norm,
        c_alpha,
    };

    let mut reports = Vec::new();
    let mut plots = Vec::new();
    for &suite in &config.suites {
        match suite {
            Suite::Concentration => {
                let set = half_space(space);
                for &r in &params.radii {
                    reports.push(concentration_check(space, &set, r, params.c)?.report);
                }
            }
            Suite::Young => {
                for (k, (u, v)) in young_grid(young_side(params.young_points)).into_iter().enumerate() {
                    reports.push(young_check(u, v).with_witness(k));
                }
            }
            _ => {
                let per_member: Vec<(Vec<InequalityReport>, Option<Vec<f64>>)> = members
                    .par_iter()
                    .map(|nu| member_reports(suite, space, nu, params, &shared))
                    .collect::<CliResult<_>>()?;
                let mut rows = Vec::new();
                for (k, (batch, row)) in per_member.into_iter().enumerate() {
                    reports.extend(batch.into_iter().map(|r| r.with_witness(k)));
                    if let Some(mut row) = row {
                        row.insert(0, k as f64);
                        rows.push(row);
                    }
                }
                match suite {
                    Suite::SmallEntropy => plots.push(PlotTable {
                        name: "small-entropy",
                        columns: vec![
                            "witness",
                            "entropy",
                            "w2sq",
                            "w2sq_over_entropy",
                            "one_plus_sqrt_log_inv_entropy",
                            "fitted_log",
                            "fitted_truncated",
                        ],
                        rows,
                    }),
                    Suite::T2 => {
                        constants.t2 = sup_estimate(rows.iter().map(|r| (r[0] as usize, r[3])));
                        plots.push(PlotTable {
                            name: "t2",
                            columns: vec!["witness", "entropy", "w2sq", "ratio"],
                            rows,
                        });
                    }
                    _ => {}
                }
            }
        }
    }
    let ratios = |name: &str| {
        sup_estimate(
            reports
                .iter()
                .filter(|r| r.name == name && r.in_domain && r.rhs > 0.0)
                .map(|r| (r.witness.expect("member report"), r.lhs * params.c / r.rhs)),
        )
    };
    constants.tronc = ratios("tronc");
    constants.var_ent = ratios("varent");

    let summary = summarize(&reports, members.len(), constants);
    Ok(SuiteRun {
        reports,
        summary,
        plots,
    })
}

/// Loads everything a config refers to and runs it.
pub fn run_suite(config: &RunConfig, origin: Option<&Path>) -> CliResult<SuiteRun> {
    config.validate()?;
    let space = config.load_space(origin)?;
    let members = if config.suites.iter().any(|s| s.needs_densities()) {
        config.load_densities(&space, origin)?
    } else {
        Vec::new()
    };
    run_suites(config, &space, &members)
}
