//! Checkers for the quantitative inequalities linking transport, entropy and
//! the spectral constants. Every checker returns [`InequalityReport`]s.
//!
//! | Checker | Statement | Kind |
//! |---------|-----------|------|
//! | [`truncation_entropy_check`] | `H ≥ (1 - 1/log a) ∫_{h>a} h log h`, `ν(h>a) ≤ H/(log a - 1)` | assertion, `a > e` |
//! | [`truncated_entropy_check`] | `H(ν_a) ≤ (1 + 1/(2(log a - 3/2)) + 2/(log a - 1)) H` | assertion, `a > e^{3/2}`, `H ≤ 1/2` |
//! | [`power_entropy_check`] | `1 - (∫h^{p/2})^{2/p} ≤ (2/p)(1 - p/2) H` | assertion, `p ∈ [1, 2)` |
//! | [`truncation_transport_check`] | `W₂²(ν) ≤ W₂²(ν_a) + ∫q₂ h 1_{h>a} dμ` | assertion |
//! | [`mass_transport_check`] | `W₂²(ν, ν_a) ≤ 2 ∫d²(x, x₀) d|ν - ν_a|` | assertion |
//! | [`bounded_density_check`] | `W₂ ≤ D(α) (log K)^{(1-α)/2} √(C H)` | diagnostic |
//! | [`small_entropy_check`] | both small-entropy transport bounds, and `ν(h > H^{-q})` | mixed |
//! | [`concentration_check`] | `μ(A_r^c) ≤ exp(-(r - √(2C log(1/μ(A))))² / 2C)` | diagnostic |
//!
//! Here `ν_a` is `ν` conditioned on `{h ≤ a}` and
//! `q₂(x) = 2 d²(x, x₀) + 2 ∫ d²(y, x₀) dμ(y)`.

use alloc::format;
use alloc::vec::Vec;
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::entropy::{entropy_of, relative_entropy, xlogx, ASSERT_SLACK};
use crate::error::{invalid, Error, Result};
use crate::orlicz::{gauge_norm, holder_orlicz_check, young_slack, Reference, YoungFunction};
use crate::report::{CheckKind, InequalityReport, Params};
use crate::space::{Density, MetricMeasureSpace};
use crate::transport::{check_exponent, wasserstein_pow, wasserstein_pow_between};

/// Slack for the transport decomposition, whose sides come from two
/// separate optimizations.
pub const TRANSPORT_SLACK: f64 = 1e-9;

const E: f64 = core::f64::consts::E;

/// `ν_a` together with the retained mass `ν(h ≤ a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub density: Density,
    pub kept_mass: f64,
}

/// `ν_a = h 1_{h≤a} μ / ν(h ≤ a)`. Returns `ν` itself when `h ≤ a` on the
/// support of μ.
pub fn truncate_density(space: &MetricMeasureSpace, nu: &Density, a: f64) -> Result<Truncation> {
    if !(a > 0.0) {
        return Err(invalid("a", format!("truncation level must be positive, got {a}")));
    }
    let mu = space.mu();
    let h = nu.h();
    if (0..h.len()).all(|i| mu[i] == 0.0 || h[i] <= a) {
        return Ok(Truncation {
            density: nu.clone(),
            kept_mass: 1.0,
        });
    }
    let kept: f64 = (0..h.len()).filter(|&i| h[i] <= a).map(|i| mu[i] * h[i]).sum();
    if !(kept > 0.0) {
        return Err(Error::Undefined(format!("ν(h ≤ {a}) = 0, nothing left after truncation")));
    }
    let cut = h.iter().map(|&x| if x <= a { x / kept } else { 0.0 }).collect();
    Ok(Truncation {
        density: Density::normalized(space, cut)?,
        kept_mass: kept,
    })
}

fn upper_mass(space: &MetricMeasureSpace, nu: &Density, a: f64) -> f64 {
    space
        .mu()
        .iter()
        .zip(nu.h())
        .filter(|(m, h)| **m > 0.0 && **h > a)
        .map(|(m, h)| m * h)
        .sum()
}

/// Both parts of the truncation entropy lemma at level `a > e`:
/// `(1 - 1/log a) ∫_{h>a} h log h dμ ≤ H` and `ν(h > a) ≤ H / (log a - 1)`.
pub fn truncation_entropy_check(
    space: &MetricMeasureSpace,
    nu: &Density,
    a: f64,
) -> Result<[InequalityReport; 2]> {
    if !(a > E && a.is_finite()) {
        return Err(invalid("a", format!("need a > e, got {a}")));
    }
    let h = relative_entropy(space, nu);
    let la = a.ln();
    let upper_log: f64 = space
        .mu()
        .iter()
        .zip(nu.h())
        .filter(|(m, x)| **m > 0.0 && **x > a)
        .map(|(m, x)| m * xlogx(*x))
        .sum();
    let params = Params {
        a: Some(a),
        ..Params::default()
    };
    Ok([
        InequalityReport::new(
            "truncation.tail-entropy",
            (1.0 - 1.0 / la) * upper_log,
            h,
            CheckKind::Assertion,
            ASSERT_SLACK,
        )
        .with_params(params),
        InequalityReport::new(
            "truncation.level-mass",
            upper_mass(space, nu, a),
            h / (la - 1.0),
            CheckKind::Assertion,
            ASSERT_SLACK,
        )
        .with_params(params),
    ])
}

/// Entropy growth under truncation. Out of domain unless `a > e^{3/2}` and
/// `H ≤ 1/2`.
pub fn truncated_entropy_check(space: &MetricMeasureSpace, nu: &Density, a: f64) -> Result<InequalityReport> {
    let name = "truncated-entropy";
    let params = Params {
        a: Some(a),
        ..Params::default()
    };
    let h = relative_entropy(space, nu);
    if !(a > E.powf(1.5) && a.is_finite()) || h > 0.5 {
        return Ok(InequalityReport::out_of_domain(name, CheckKind::Assertion).with_params(params));
    }
    let la = a.ln();
    let factor = 1.0 + 1.0 / (2.0 * (la - 1.5)) + 2.0 / (la - 1.0);
    let cut = truncate_density(space, nu, a)?;
    Ok(InequalityReport::new(
        name,
        relative_entropy(space, &cut.density),
        factor * h,
        CheckKind::Assertion,
        ASSERT_SLACK,
    )
    .with_params(params))
}

/// `1 - (∫h^{p/2} dμ)^{2/p} ≤ (2/p)(1 - p/2) H` for `p ∈ [1, 2)`.
pub fn power_entropy_check(space: &MetricMeasureSpace, nu: &Density, p: f64) -> Result<InequalityReport> {
    if !(1.0..2.0).contains(&p) {
        return Err(invalid("p", format!("{p} outside [1, 2)")));
    }
    let moment: f64 = space
        .mu()
        .iter()
        .zip(nu.h())
        .filter(|(m, x)| **m > 0.0 && **x > 0.0)
        .map(|(m, x)| m * (0.5 * p * x.ln()).exp())
        .sum();
    let lhs = -((2.0 / p) * moment.ln()).exp_m1();
    let rhs = (2.0 / p) * (1.0 - 0.5 * p) * relative_entropy(space, nu);
    Ok(InequalityReport::new("power-entropy", lhs, rhs, CheckKind::Assertion, ASSERT_SLACK).with_params(Params {
        p: Some(p),
        ..Params::default()
    }))
}

/// `D(α) = 16 exp((1-α)/2 · (1 - log(1-α)))`, with `D(1) = 16`.
pub fn d_alpha(alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} outside [0, 1]")));
    }
    let x = 1.0 - alpha;
    if x == 0.0 {
        return Ok(16.0);
    }
    Ok(16.0 * (0.5 * x * (1.0 - x.ln())).exp())
}

/// Exponent minimizing the bounded-density estimate: `2 - (1-α)/log K`.
/// Returned as the raw formula; values below 1 mean the optimum sits
/// outside `[1, 2)`.
pub fn optimal_p(alpha: f64, k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid("alpha", format!("{alpha} outside [0, 1]")));
    }
    if !(k > 1.0 && k.is_finite()) {
        return Err(invalid("K", format!("need K > 1, got {k}")));
    }
    Ok(2.0 - (1.0 - alpha) / k.ln())
}

/// `W₂(ν, μ) ≤ D(α) (log K)^{(1-α)/2} √(C(α) H)` with `K = max h`. A
/// continuum statement: the report is a diagnostic. Out of domain for
/// `ν = μ`.
pub fn bounded_density_check(
    space: &MetricMeasureSpace,
    nu: &Density,
    alpha: f64,
    c_alpha: f64,
) -> Result<InequalityReport> {
    let d = d_alpha(alpha)?;
    if !(c_alpha > 0.0 && c_alpha.is_finite()) {
        return Err(invalid("C", format!("need a positive constant, got {c_alpha}")));
    }
    let k = nu.sup(space);
    let params = Params {
        alpha: Some(alpha),
        k: Some(k),
        c: Some(c_alpha),
        ..Params::default()
    };
    let h = relative_entropy(space, nu);
    if !(k > 1.0) || h == 0.0 {
        return Ok(InequalityReport::out_of_domain("bounded-density", CheckKind::Diagnostic).with_params(params));
    }
    let w2 = wasserstein_pow(space, nu, 2.0)?.max(0.0).sqrt();
    let rhs = d * k.ln().powf(0.5 * (1.0 - alpha)) * (c_alpha * h).sqrt();
    Ok(InequalityReport::new("bounded-density", w2, rhs, CheckKind::Diagnostic, 0.0).with_params(params))
}

fn q2(space: &MetricMeasureSpace) -> Vec<f64> {
    let d2 = space.dist_to_base_pow(2.0);
    let mean = space.integrate(&d2);
    d2.iter().map(|d| 2.0 * d + 2.0 * mean).collect()
}

/// `W₂²(ν, μ) ≤ W₂²(ν_a, μ) + ∫ q₂ h 1_{h>a} dμ`, exact transport on both
/// sides.
pub fn truncation_transport_check(space: &MetricMeasureSpace, nu: &Density, a: f64) -> Result<InequalityReport> {
    let cut = truncate_density(space, nu, a)?;
    let q = q2(space);
    let tail: f64 = (0..space.n())
        .filter(|&i| space.mu()[i] > 0.0 && nu.h()[i] > a)
        .map(|i| q[i] * nu.h()[i] * space.mu()[i])
        .sum();
    let lhs = wasserstein_pow(space, nu, 2.0)?;
    let rhs = wasserstein_pow(space, &cut.density, 2.0)? + tail;
    Ok(
        InequalityReport::new("truncation-transport", lhs, rhs, CheckKind::Assertion, TRANSPORT_SLACK).with_params(Params {
            a: Some(a),
            ..Params::default()
        }),
    )
}

/// `W₂²(ν, ν_a) ≤ 2 ∫ d²(x, x₀) d|ν - ν_a|`, the mass-transport bound with
/// its constant fixed at 2.
pub fn mass_transport_check(space: &MetricMeasureSpace, nu: &Density, a: f64) -> Result<InequalityReport> {
    let cut = truncate_density(space, nu, a)?;
    let d2 = space.dist_to_base_pow(2.0);
    let mu = space.mu();
    let rhs = 2.0
        * (0..space.n())
            .map(|i| d2[i] * mu[i] * (nu.h()[i] - cut.density.h()[i]).abs())
            .sum::<f64>();
    let lhs = wasserstein_pow_between(space, &nu.weights(space), &cut.density.weights(space), 2.0)?;
    Ok(
        InequalityReport::new("mass-transport", lhs, rhs, CheckKind::Assertion, TRANSPORT_SLACK).with_params(
            Params {
                a: Some(a),
                c: Some(2.0),
                ..Params::default()
            },
        ),
    )
}

fn check_small_entropy(space: &MetricMeasureSpace, nu: &Density, a: f64) -> Result<f64> {
    if !(a > E.powf(1.5) && a.is_finite()) {
        return Err(invalid("a", format!("need a > e^(3/2), got {a}")));
    }
    let h = relative_entropy(space, nu);
    if h == 0.0 {
        return Err(Error::Undefined("ratio needs positive relative entropy".into()));
    }
    if h > 0.5 {
        return Err(Error::Undefined(format!("H = {h} exceeds 1/2")));
    }
    Ok(h)
}

/// `W₂²(ν_a, ν) / H`; its supremum over small-entropy densities estimates
/// the truncation constant `c(a)`.
pub fn tronc_functional(space: &MetricMeasureSpace, nu: &Density, a: f64) -> Result<f64> {
    let h = check_small_entropy(space, nu, a)?;
    let cut = truncate_density(space, nu, a)?;
    Ok(wasserstein_pow_between(space, &cut.density.weights(space), &nu.weights(space), 2.0)? / h)
}

/// `∫ d²(x, x₀) 1_{h>a} dν / H`; its supremum estimates `D(a)`.
pub fn var_ent_functional(space: &MetricMeasureSpace, nu: &Density, a: f64) -> Result<f64> {
    let h = check_small_entropy(space, nu, a)?;
    truncate_density(space, nu, a)?;
    let d2 = space.dist_to_base_pow(2.0);
    let upper: f64 = (0..space.n())
        .filter(|&i| nu.h()[i] > a)
        .map(|i| d2[i] * nu.h()[i] * space.mu()[i])
        .sum();
    Ok(upper / h)
}

/// Small-entropy transport bounds for one density.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallEntropyReports {
    pub entropy: f64,
    /// `W₂²(ν, μ)`.
    pub w2sq: f64,
    /// Smallest `c` with `W₂² ≤ W₂²(ν_a, μ) + c H log(1/H)`.
    pub fitted_truncated: Option<f64>,
    /// Smallest `C` with `W₂² ≤ C (1 + √log⁺(1/H)) H`.
    pub fitted_log: Option<f64>,
    /// The truncated bound at the supplied constant (diagnostic).
    pub truncated: InequalityReport,
    /// The logarithmic bound at the supplied constant (diagnostic).
    pub logarithmic: InequalityReport,
    /// `ν(h > K) ≤ H / (q log(1/H))` at `K = H^{-q}` (assertion, `K > e`).
    pub level_mass: InequalityReport,
    /// `ν(h > K) ≤ H / (log K - 1)`, the tail-entropy bound at level `K`.
    pub level_mass_rigorous: InequalityReport,
}

/// Evaluates both small-entropy bounds at constant `c`, and the mass above
/// the entropy-dependent level `K = H^{-q}`. Everything is out of domain
/// unless `H ∈ (0, 1/2]`; the level-mass reports additionally need `K > e`,
/// and the truncated bound needs `a > e^{3/2}` with a nonempty truncation.
pub fn small_entropy_check(
    space: &MetricMeasureSpace,
    nu: &Density,
    a: f64,
    q: f64,
    c: f64,
) -> Result<SmallEntropyReports> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(invalid("q", format!("need q > 0, got {q}")));
    }
    let h = relative_entropy(space, nu);
    let base = Params {
        a: Some(a),
        q: Some(q),
        c: Some(c),
        ..Params::default()
    };
    let ood = |name: &str, kind| InequalityReport::out_of_domain(name, kind).with_params(base);
    if !(h > 0.0 && h <= 0.5) {
        return Ok(SmallEntropyReports {
            entropy: h,
            w2sq: f64::NAN,
            fitted_truncated: None,
            fitted_log: None,
            truncated: ood("small-entropy.truncated", CheckKind::Diagnostic),
            logarithmic: ood("small-entropy.log", CheckKind::Diagnostic),
            level_mass: ood("small-entropy.level-mass", CheckKind::Assertion),
            level_mass_rigorous: ood("small-entropy.level-mass-rigorous", CheckKind::Assertion),
        });
    }
    let w2sq = wasserstein_pow(space, nu, 2.0)?;
    let log_inv = (1.0 / h).ln();

    let (truncated, fitted_truncated) = match truncate_density(space, nu, a) {
        Ok(cut) if a > E.powf(1.5) => {
            let w2a = wasserstein_pow(space, &cut.density, 2.0)?;
            let shape = h * log_inv;
            let rep = InequalityReport::new("small-entropy.truncated", w2sq, w2a + c * shape, CheckKind::Diagnostic, 0.0)
                .with_params(base);
            (rep, Some(((w2sq - w2a) / shape).max(0.0)))
        }
        _ => (ood("small-entropy.truncated", CheckKind::Diagnostic), None),
    };

    let shape = (1.0 + log_inv.max(0.0).sqrt()) * h;
    let logarithmic =
        InequalityReport::new("small-entropy.log", w2sq, c * shape, CheckKind::Diagnostic, 0.0).with_params(base);

    let k = h.powf(-q);
    let level = Params {
        k: Some(k),
        ..base
    };
    let (level_mass, level_mass_rigorous) = if k > E {
        let mass = upper_mass(space, nu, k);
        (
            InequalityReport::new("small-entropy.level-mass", mass, h / (q * log_inv), CheckKind::Assertion, ASSERT_SLACK)
                .with_params(level),
            InequalityReport::new("small-entropy.level-mass-rigorous", mass, h / (k.ln() - 1.0), CheckKind::Assertion, ASSERT_SLACK)
                .with_params(level),
        )
    } else {
        (
            ood("small-entropy.level-mass", CheckKind::Assertion).with_params(level),
            ood("small-entropy.level-mass-rigorous", CheckKind::Assertion).with_params(level),
        )
    };

    Ok(SmallEntropyReports {
        entropy: h,
        w2sq,
        fitted_truncated,
        fitted_log: Some(w2sq / shape),
        truncated,
        logarithmic,
        level_mass,
        level_mass_rigorous,
    })
}

/// Concentration of `μ` around a set.
#[derive(Debug, Clone, PartialEq)]
pub struct Concentration {
    pub report: InequalityReport,
    /// `μ(A)`.
    pub set_mass: f64,
    /// `μ(A_r^c)`, `A_r^c = {x : d(x, A) ≥ r}`.
    pub tail_mass: f64,
    /// Radius below which the bound is the trivial value 1.
    pub threshold: f64,
}

/// `μ(A_r^c) ≤ exp(-(r - √(2C log(1/μ(A))))² / 2C)` for `r` at least the
/// threshold, and `≤ 1` below it. Needs `μ(A) ≥ 1/2`.
pub fn concentration_check(space: &MetricMeasureSpace, set: &[usize], r: f64, c: f64) -> Result<Concentration> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(invalid("r", format!("need r ≥ 0, got {r}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid("C", format!("need C > 0, got {c}")));
    }
    let n = space.n();
    if let Some(&bad) = set.iter().find(|&&i| i >= n) {
        return Err(invalid("A", format!("index {bad} out of range")));
    }
    let mut in_set = alloc::vec![false; n];
    set.iter().for_each(|&i| in_set[i] = true);
    let set_mass: f64 = (0..n).filter(|&i| in_set[i]).map(|i| space.mu()[i]).sum();
    if set_mass < 0.5 {
        return Err(invalid("A", format!("μ(A) = {set_mass} is below 1/2")));
    }
    let tail_mass: f64 = (0..n)
        .filter(|&x| {
            let dist = set.iter().map(|&y| space.dist(x, y)).fold(f64::INFINITY, f64::min);
            dist >= r
        })
        .map(|x| space.mu()[x])
        .sum();
    let threshold = (2.0 * c * (1.0 / set_mass).ln()).sqrt();
    let bound = if r >= threshold {
        (-(r - threshold) * (r - threshold) / (2.0 * c)).exp()
    } else {
        1.0
    };
    Ok(Concentration {
        report: InequalityReport::new("concentration", tail_mass, bound, CheckKind::Diagnostic, 0.0).with_params(
            Params {
                r: Some(r),
                c: Some(c),
                ..Params::default()
            },
        ),
        set_mass,
        tail_mass,
        threshold,
    })
}

/// `W_p²(ν, μ) / (2H)`, the ratio bounded by `C` under `T_p(C)`.
pub fn tp_ratio(space: &MetricMeasureSpace, nu: &Density, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let h = relative_entropy(space, nu);
    if h == 0.0 {
        return Err(Error::Undefined("ratio needs positive relative entropy".into()));
    }
    let wpp = wasserstein_pow(space, nu, p)?.max(0.0);
    Ok(wpp.powf(2.0 / p) / (2.0 * h))
}

/// `W₂²(ν, μ) / (2H)`.
pub fn t2_ratio(space: &MetricMeasureSpace, nu: &Density) -> Result<f64> {
    tp_ratio(space, nu, 2.0)
}

/// Family supremum of [`tp_ratio`]: a lower bound on the best `T_p` constant.
#[derive(Debug, Clone, PartialEq)]
pub struct TpEstimate {
    pub value: f64,
    /// Index of the member attaining the supremum.
    pub argmax: Option<usize>,
    /// Per-member ratio; `None` where `ν = μ`.
    pub ratios: Vec<Option<f64>>,
}

/// Supremum of `W_p²/(2H)` over the members with positive entropy.
pub fn estimate_tp_constant(space: &MetricMeasureSpace, family: &[Density], p: f64) -> Result<TpEstimate> {
    check_exponent(p)?;
    let mut ratios = Vec::with_capacity(family.len());
    for nu in family {
        ratios.push(match tp_ratio(space, nu, p) {
            Ok(r) => Some(r),
            Err(Error::Undefined(_)) => None,
            Err(e) => return Err(e),
        });
    }
    Ok(supremum(ratios))
}

pub(crate) fn supremum(ratios: Vec<Option<f64>>) -> TpEstimate {
    let mut value = f64::NEG_INFINITY;
    let mut argmax = None;
    for (k, r) in ratios.iter().enumerate() {
        if let Some(r) = *r {
            if r > value {
                value = r;
                argmax = Some(k);
            }
        }
    }
    TpEstimate { value, argmax, ratios }
}

/// Young's inequality `uv ≤ τ(u) + τ*(v)` at one point.
pub fn young_check(u: f64, v: f64) -> InequalityReport {
    let rhs = YoungFunction::Tau.eval(u) + YoungFunction::TauStar.eval(v);
    let mut r = InequalityReport::new("young", u * v, rhs, CheckKind::Assertion, ASSERT_SLACK);
    r.margin = young_slack(u, v);
    r
}

/// Gauge bound `N_ψ(g) ≤ max{1, ∫ψ(g)}`.
pub fn gauge_bound_check(g: &[f64], psi: YoungFunction, reference: Reference<'_>) -> Result<InequalityReport> {
    let n = gauge_norm(g, psi, reference)?.value;
    let bound = reference.integrate(g, |x| psi.eval(x)).max(1.0);
    Ok(InequalityReport::new("gauge-bound", n, bound, CheckKind::Assertion, ASSERT_SLACK))
}

/// Hölder–Orlicz `∫fg ≤ 2 N_τ(f) N_τ*(g)` as a report.
pub fn holder_orlicz_report(f: &[f64], g: &[f64], reference: Reference<'_>) -> Result<InequalityReport> {
    let r = holder_orlicz_check(f, g, reference)?;
    Ok(InequalityReport::new("holder-orlicz", r.lhs, r.rhs, CheckKind::Assertion, ASSERT_SLACK))
}

/// `1 - u^{2/p} ≤ (2/p)(1 - u)` for `u ∈ [0, 1]`, `p ∈ [1, 2)`.
pub fn power_mean_slack(u: f64, p: f64) -> f64 {
    (2.0 / p) * (1.0 - u) + (2.0 / p * u.ln()).exp_m1()
}

/// `ξ log ξ + 1 - ξ ≥ 0` for `ξ > 0`.
pub fn entropy_slack(xi: f64) -> f64 {
    xlogx(xi) + 1.0 - xi
}

/// Relative entropy of a weight vector against `μ` (no density object).
pub fn entropy_of_weights(mu: &[f64], nu: &[f64]) -> f64 {
    let h: Vec<f64> = mu.iter().zip(nu).map(|(m, v)| if *m > 0.0 { v / m } else { 0.0 }).collect();
    entropy_of(mu, &h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_point() -> MetricMeasureSpace {
        MetricMeasureSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.5], None)
            .unwrap()
    }

    #[test]
    fn truncation_examples() {
        let s = two_point();
        let nu = Density::normalized(&s, vec![1.5, 0.5]).unwrap();
        let t = truncate_density(&s, &nu, 1.0).unwrap();
        assert!((t.kept_mass - 0.25).abs() < 1e-15);
        assert_eq!(t.density.h(), &[0.0, 2.0]);
        let same = truncate_density(&s, &nu, 2.0).unwrap();
        assert_eq!(same.density, nu);
        assert!(matches!(truncate_density(&s, &nu, 0.4), Err(Error::Undefined(_))));
    }

    #[test]
    fn reference_density_gives_zero_sides() {
        let s = two_point();
        let one = Density::uniform(2);
        for r in truncation_entropy_check(&s, &one, E * E).unwrap() {
            assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        }
        let r = power_entropy_check(&s, &one, 1.5).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(truncation_entropy_check(&s, &one, 2.0).is_err());
    }

    #[test]
    fn alpha_constants() {
        assert!((d_alpha(0.0).unwrap() - 16.0 * 0.5f64.exp()).abs() < 1e-13);
        assert_eq!(d_alpha(1.0).unwrap(), 16.0);
        assert!((d_alpha(1.0 - 1e-12).unwrap() - 16.0).abs() < 1e-8);
        assert!((optimal_p(0.0, E).unwrap() - 1.0).abs() < 1e-15);
        assert!(optimal_p(0.0, 1.0).is_err());
    }

    #[test]
    fn entropy_growth_out_of_domain() {
        let s = two_point();
        let big = Density::point_mass(&s, 0).unwrap(); // H = log 2 > 1/2
        let r = truncated_entropy_check(&s, &big, E * E).unwrap();
        assert!(!r.in_domain);
    }

    #[test]
    fn concentration_threshold_gives_trivial_bound() {
        let s = MetricMeasureSpace::from_line(vec![0.0, 1.0, 2.0, 3.0], vec![0.4, 0.3, 0.2, 0.1], None)
            .unwrap();
        let c = 1.0;
        let mass = 0.7f64;
        let r0 = (2.0 * c * (1.0 / mass).ln()).sqrt();
        let out = concentration_check(&s, &[0, 1], r0, c).unwrap();
        assert!((out.report.rhs - 1.0).abs() < 1e-15);
        assert!(concentration_check(&s, &[1], 1.0, c).is_err());
    }

    #[test]
    fn elementary_slacks() {
        assert_eq!(power_mean_slack(1.0, 1.5), 0.0);
        assert!(power_mean_slack(0.0, 1.0) >= 0.0);
        assert_eq!(entropy_slack(1.0), 0.0);
    }
}
