//! Relative entropy and the large-entropy side of the transport bounds.
//!
//! | Function | Quantity |
//! |----------|----------|
//! | [`relative_entropy`] | `H(ν, μ) = Σ μ_i h_i log h_i` |
//! | [`h_log_plus`] | `∫ h log⁺h dμ` |
//! | [`exp_integral`] | `Σ μ_i exp(ε d(x_i, x₀)^p)` |
//! | [`distance_norm`] | `N_τ*(d^p)` over `μ⊗μ` |
//! | [`large_entropy_bound`] | `W_p^p ≤ 2(1 + 1/e) N_τ*(d^p) H` for `H ≥ 1` |
//! | [`transport_entropy_ratio`] | `W_p^p / (H + H^{1/2})` |
//!
//! Densities always live on the support of `μ`, so the "`+∞` when `ν` is
//! not absolutely continuous" branch of the entropy is unreachable here.

use alloc::format;
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::orlicz::{gauge_norm, OrliczNorm, Reference, YoungFunction};
use crate::report::{CheckKind, InequalityReport, Params};
use crate::space::{Density, MetricMeasureSpace};
use crate::transport::{check_exponent, wasserstein_pow};

/// Slack for inequalities that hold exactly on finite spaces.
pub const ASSERT_SLACK: f64 = 1e-12;

const INV_E: f64 = 1.0 / core::f64::consts::E;

/// `H(ν, μ)` for `ν = hμ`, with `0 log 0 = 0`.
///
/// Summed as `Σ μ_i (h_i log h_i - h_i + 1)`, which equals the plain sum for
/// a normalized density and has nonnegative terms.
pub fn relative_entropy(space: &MetricMeasureSpace, nu: &Density) -> f64 {
    entropy_of(space.mu(), nu.h())
}

pub(crate) fn entropy_of(mu: &[f64], h: &[f64]) -> f64 {
    mu.iter()
        .zip(h)
        .filter(|(m, _)| **m > 0.0)
        .map(|(m, &x)| m * (xlogx(x) - x + 1.0))
        .sum()
}

pub(crate) fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `∫ h log⁺h dμ`.
pub fn h_log_plus(space: &MetricMeasureSpace, nu: &Density) -> f64 {
    space
        .mu()
        .iter()
        .zip(nu.h())
        .map(|(m, &x)| m * YoungFunction::Tau.eval(x))
        .sum()
}

/// `∫ h log⁺h dμ ≤ H + 1/e`, valid for every density.
pub fn h_log_plus_check(space: &MetricMeasureSpace, nu: &Density) -> InequalityReport {
    InequalityReport::new(
        "hlogplus",
        h_log_plus(space, nu),
        relative_entropy(space, nu) + INV_E,
        CheckKind::Assertion,
        ASSERT_SLACK,
    )
}

/// `Σ μ_i exp(ε d(x_i, x₀)^p)`.
pub fn exp_integral(space: &MetricMeasureSpace, eps: f64, p: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps", format!("must be positive, got {eps}")));
    }
    check_exponent(p)?;
    let total: f64 = space
        .dist_to_base_pow(p)
        .iter()
        .zip(space.mu())
        .map(|(d, m)| m * (eps * d).exp())
        .sum();
    if !total.is_finite() {
        return Err(Error::Overflow(format!(
            "exponential integral overflows at eps = {eps}; use a smaller eps"
        )));
    }
    Ok(total)
}

/// `N_τ*(d^p)` on `μ⊗μ`.
pub fn distance_norm(space: &MetricMeasureSpace, p: f64) -> Result<OrliczNorm> {
    check_exponent(p)?;
    gauge_norm(&space.cost_matrix(p), YoungFunction::TauStar, Reference::Product(space.mu()))
}

/// The large-entropy transport bound together with its intermediate step.
#[derive(Debug, Clone, PartialEq)]
pub struct LargeEntropyBound {
    /// `W_p^p ≤ 2(1 + 1/e) N_τ*(d^p) H`; in domain iff `H ≥ 1`.
    pub report: InequalityReport,
    /// `∫ h log⁺h ≤ (1 + 1/e) H`; in domain iff `H ≥ 1`.
    pub intermediate: InequalityReport,
    pub entropy: f64,
    pub norm: f64,
}

impl LargeEntropyBound {
    pub fn bound(&self) -> f64 {
        self.report.rhs
    }

    pub fn holds(&self) -> bool {
        self.report.margin >= -self.report.slack
    }
}

/// Evaluates the bound for any `ν`; the guarantee applies only when
/// `H(ν, μ) ≥ 1`, which is what `in_domain` records.
pub fn large_entropy_bound(space: &MetricMeasureSpace, nu: &Density, p: f64) -> Result<LargeEntropyBound> {
    let norm = distance_norm(space, p)?.value;
    large_entropy_bound_with_norm(space, nu, p, norm)
}

/// As [`large_entropy_bound`] with `N_τ*(d^p)` precomputed, for sweeps.
pub fn large_entropy_bound_with_norm(
    space: &MetricMeasureSpace,
    nu: &Density,
    p: f64,
    norm: f64,
) -> Result<LargeEntropyBound> {
    let entropy = relative_entropy(space, nu);
    let wpp = wasserstein_pow(space, nu, p)?;
    let params = Params {
        p: Some(p),
        ..Params::default()
    };
    let in_domain = entropy >= 1.0;
    let mut report = InequalityReport::new(
        "large-entropy",
        wpp,
        2.0 * (1.0 + INV_E) * norm * entropy,
        CheckKind::Assertion,
        ASSERT_SLACK,
    )
    .with_params(params);
    report.in_domain = in_domain;
    let mut intermediate = InequalityReport::new(
        "large-entropy.hlogplus",
        h_log_plus(space, nu),
        (1.0 + INV_E) * entropy,
        CheckKind::Assertion,
        ASSERT_SLACK,
    );
    intermediate.in_domain = in_domain;
    Ok(LargeEntropyBound {
        report,
        intermediate,
        entropy,
        norm,
    })
}

/// `W_p^p(ν, μ) / (H + √H)`. Its supremum over a family is an empirical
/// lower bound for the constant of the small-entropy transport bound.
pub fn transport_entropy_ratio(space: &MetricMeasureSpace, nu: &Density, p: f64) -> Result<f64> {
    let h = relative_entropy(space, nu);
    if h <= 0.0 {
        return Err(Error::Undefined("ratio needs positive relative entropy".into()));
    }
    Ok(wasserstein_pow(space, nu, p)? / (h + h.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::gaussian_grid;
    use alloc::vec;

    fn two_point() -> MetricMeasureSpace {
        MetricMeasureSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.5], None)
            .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let s = two_point();
        assert_eq!(relative_entropy(&s, &Density::uniform(2)), 0.0);
        let nu = Density::normalized(&s, vec![1.5, 0.5]).unwrap();
        let expected = 0.75 * 1.5f64.ln() + 0.25 * 0.5f64.ln();
        assert!((relative_entropy(&s, &nu) - expected).abs() < 1e-15);
    }

    #[test]
    fn point_mass_entropy_is_log_inverse_mass() {
        let s = gaussian_grid(-3.0, 3.0, 31).unwrap();
        for k in [0, 7, 15] {
            let nu = Density::point_mass(&s, k).unwrap();
            let h = relative_entropy(&s, &nu);
            let expected = (1.0 / s.mu()[k]).ln();
            assert!((h - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }

    #[test]
    fn exp_integral_limits() {
        let s = gaussian_grid(-6.0, 6.0, 241).unwrap();
        assert!((exp_integral(&s, 1e-14, 2.0).unwrap() - 1.0).abs() < 1e-12);
        let one = MetricMeasureSpace::from_matrix(vec![vec![0.0]], vec![1.0], None).unwrap();
        assert_eq!(exp_integral(&one, 3.0, 2.0).unwrap(), 1.0);
        let far = MetricMeasureSpace::from_line(vec![0.0, 1e3], vec![0.5, 0.5], Some(0)).unwrap();
        assert!(matches!(exp_integral(&far, 1.0, 2.0), Err(Error::Overflow(_))));
        assert!(exp_integral(&s, 0.0, 2.0).is_err());
    }

    #[test]
    fn reference_measure_is_out_of_domain_for_the_large_entropy_bound() {
        let s = two_point();
        let b = large_entropy_bound(&s, &Density::uniform(2), 2.0).unwrap();
        assert!(!b.report.in_domain);
        assert_eq!(b.entropy, 0.0);
    }

    #[test]
    fn ratio_rejects_the_reference_measure() {
        let s = two_point();
        assert!(transport_entropy_ratio(&s, &Density::uniform(2), 1.0).is_err());
        let nu = Density::point_mass(&s, 0).unwrap();
        let r = transport_entropy_ratio(&s, &nu, 1.0).unwrap();
        // W_1 = 1/2, H = log 2
        let h = 2f64.ln();
        assert!((r - 0.5 / (h + h.sqrt())).abs() < 1e-15);
    }
}
