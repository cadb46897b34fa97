//! The Young pair `τ(u) = u log⁺u`, `τ*(v) = v 1_{v<1} + e^{v-1} 1_{v≥1}` and
//! the gauge norms `N_ψ(g) = inf{λ > 0 : ∫ψ(g/λ) ≤ 1}` they induce.
//!
//! | Item | Meaning |
//! |------|---------|
//! | [`YoungFunction`] | `τ` or its conjugate `τ*` |
//! | [`Reference`] | integrate against `μ` (length `n`) or `μ⊗μ` (length `n²`, row-major) |
//! | [`gauge_norm`] | bracketing plus bisection, returns the feasible end |
//! | [`holder_orlicz_check`] | `∫fg ≤ 2 N_τ(f) N_τ*(g)` |
//!
//! Product-measure integrals are full `n²` sums in row-major order.

use alloc::format;
use alloc::vec::Vec;
// float math for no_std; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};

/// The two Young functions used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YoungFunction {
    /// `u log⁺ u`.
    Tau,
    /// Legendre conjugate of `τ`.
    TauStar,
}

impl YoungFunction {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Tau => {
                if x <= 1.0 {
                    0.0
                } else {
                    x * x.ln()
                }
            }
            Self::TauStar => {
                if x < 1.0 {
                    x
                } else {
                    (x - 1.0).exp()
                }
            }
        }
    }

    pub fn conjugate(self) -> Self {
        match self {
            Self::Tau => Self::TauStar,
            Self::TauStar => Self::Tau,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Tau => "tau",
            Self::TauStar => "tau_star",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "tau" => Some(Self::Tau),
            "tau_star" => Some(Self::TauStar),
            _ => None,
        }
    }
}

/// `τ(u) + τ*(v) - uv`, nonnegative for `u, v ≥ 0`.
pub fn young_slack(u: f64, v: f64) -> f64 {
    YoungFunction::Tau.eval(u) + YoungFunction::TauStar.eval(v) - u * v
}

/// Measure a gauge norm is taken against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference<'a> {
    /// Functions of one point, weights `μ`.
    Measure(&'a [f64]),
    /// Functions of two points stored row-major, weights `μ_i μ_j`.
    Product(&'a [f64]),
}

impl Reference<'_> {
    /// Number of values a function on this reference carries.
    pub fn len(&self) -> usize {
        match self {
            Self::Measure(mu) => mu.len(),
            Self::Product(mu) => mu.len() * mu.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_product(&self) -> bool {
        matches!(self, Self::Product(_))
    }

    /// `∫ φ(g_k) d(reference)` in a fixed order.
    pub fn integrate(&self, g: &[f64], phi: impl Fn(f64) -> f64) -> f64 {
        match self {
            Self::Measure(mu) => mu.iter().zip(g).map(|(m, x)| m * phi(*x)).sum(),
            Self::Product(mu) => {
                let n = mu.len();
                mu.iter()
                    .enumerate()
                    .map(|(i, mi)| {
                        let row = &g[i * n..(i + 1) * n];
                        mi * mu.iter().zip(row).map(|(mj, x)| mj * phi(*x)).sum::<f64>()
                    })
                    .sum()
            }
        }
    }

    fn check(&self, name: &'static str, g: &[f64]) -> Result<()> {
        if g.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                got: g.len(),
            });
        }
        if let Some(k) = g.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(invalid(name, format!("entry {k} is {} (need finite, ≥ 0)", g[k])));
        }
        Ok(())
    }
}

/// A computed gauge norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrliczNorm {
    pub value: f64,
    pub psi: YoungFunction,
    pub product: bool,
}

/// `N_ψ(g)` on the reference. The returned value is the upper end of the
/// final bisection bracket, so `∫ψ(g/N) ≤ 1` holds up to rounding and the
/// relative bracket width is below `1e-14`.
pub fn gauge_norm(g: &[f64], psi: YoungFunction, reference: Reference<'_>) -> Result<OrliczNorm> {
    reference.check("g", g)?;
    let out = |value| OrliczNorm {
        value,
        psi,
        product: reference.is_product(),
    };
    let integral = |lambda: f64| reference.integrate(g, |x| psi.eval(x / lambda));
    // only the part of g carrying reference mass matters
    if reference.integrate(g, |x| x) == 0.0 {
        return Ok(out(0.0));
    }

    // the gauge bound max{1, ∫ψ(g)} is feasible; guard against rounding
    let mut hi = integral(1.0).max(1.0);
    if !hi.is_finite() {
        // ψ(g) overflowed; at λ = max g both Young functions are feasible
        hi = g.iter().fold(0.0f64, |m, x| m.max(*x));
    }
    while integral(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi * 2f64.powi(-60);
    while integral(lo) <= 1.0 {
        hi = lo;
        lo *= 2f64.powi(-60);
        if lo == 0.0 {
            return Err(Error::Undefined("gauge norm below representable range".into()));
        }
    }
    for _ in 0..400 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = if hi / lo > 4.0 { (hi * lo).sqrt() } else { 0.5 * (hi + lo) };
        if integral(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(out(hi))
}

/// Both sides of the Hölder–Orlicz inequality `∫fg ≤ 2 N_τ(f) N_τ*(g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderOrlicz {
    /// `∫ f g`.
    pub lhs: f64,
    /// `2 N_τ(f) N_τ*(g)`.
    pub rhs: f64,
    pub margin: f64,
}

pub fn holder_orlicz_check(f: &[f64], g: &[f64], reference: Reference<'_>) -> Result<HolderOrlicz> {
    reference.check("f", f)?;
    reference.check("g", g)?;
    let nf = gauge_norm(f, YoungFunction::Tau, reference)?.value;
    let ng = gauge_norm(g, YoungFunction::TauStar, reference)?.value;
    let fg: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
    let lhs = reference.integrate(&fg, |x| x);
    let rhs = 2.0 * nf * ng;
    Ok(HolderOrlicz {
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// Lifts a function of the first coordinate to the product reference:
/// `(x, y) ↦ f(x)`.
pub fn lift_first(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut out = Vec::with_capacity(n * n);
    for &v in f {
        out.extend(core::iter::repeat(v).take(n));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn young_pair_values_and_equality_case() {
        assert_eq!(YoungFunction::Tau.eval(0.5), 0.0);
        assert_eq!(YoungFunction::TauStar.eval(0.5), 0.5);
        // continuity at the joins
        assert_eq!(YoungFunction::Tau.eval(1.0), 0.0);
        assert_eq!(YoungFunction::TauStar.eval(1.0), 1.0);
        let e = core::f64::consts::E;
        assert!(young_slack(e, 2.0).abs() < 1e-15);
    }

    #[test]
    fn overflowing_integrand_still_brackets() {
        let mu = [0.5, 0.5];
        let n = gauge_norm(&[900.0, 10.0], YoungFunction::TauStar, Reference::Measure(&mu)).unwrap();
        let at = Reference::Measure(&mu).integrate(&[900.0, 10.0], |x| YoungFunction::TauStar.eval(x / n.value));
        assert!((at - 1.0).abs() < 1e-8);
    }

    #[test]
    fn constant_under_tau_star_has_norm_c() {
        let mu = [0.2, 0.3, 0.5];
        for c in [0.01, 1.0, 7.5] {
            let n = gauge_norm(&[c; 3], YoungFunction::TauStar, Reference::Measure(&mu)).unwrap();
            assert!((n.value - c).abs() <= 1e-10 * c, "{c}: {}", n.value);
        }
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let mu = [0.5, 0.5];
        for psi in [YoungFunction::Tau, YoungFunction::TauStar] {
            assert_eq!(gauge_norm(&[0.0; 2], psi, Reference::Measure(&mu)).unwrap().value, 0.0);
            assert_eq!(gauge_norm(&[0.0; 4], psi, Reference::Product(&mu)).unwrap().value, 0.0);
        }
    }

    #[test]
    fn defining_equation_holds_at_the_norm() {
        let mu = [0.1, 0.2, 0.3, 0.4];
        let g = [0.0, 3.0, 0.5, 12.0];
        for psi in [YoungFunction::Tau, YoungFunction::TauStar] {
            let n = gauge_norm(&g, psi, Reference::Measure(&mu)).unwrap().value;
            let v = Reference::Measure(&mu).integrate(&g, |x| psi.eval(x / n));
            assert!((v - 1.0).abs() < 1e-8, "{psi:?}: {v}");
        }
    }

    #[test]
    fn product_reference_matches_explicit_sum() {
        let mu = [0.25, 0.75];
        let g = [1.0, 2.0, 3.0, 4.0];
        let direct = 0.25 * 0.25 * 1.0 + 0.25 * 0.75 * 2.0 + 0.75 * 0.25 * 3.0 + 0.75 * 0.75 * 4.0;
        assert!((Reference::Product(&mu).integrate(&g, |x| x) - direct).abs() < 1e-15);
        assert_eq!(lift_first(&[1.0, 2.0]), vec![1.0, 1.0, 2.0, 2.0]);
    }

    #[test]
    fn rejects_negative_and_misshapen_input() {
        let mu = [0.5, 0.5];
        assert!(gauge_norm(&[-1.0, 0.0], YoungFunction::Tau, Reference::Measure(&mu)).is_err());
        assert!(gauge_norm(&[1.0, 0.0], YoungFunction::Tau, Reference::Product(&mu)).is_err());
    }
}
