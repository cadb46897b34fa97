//! Run configuration: which space, which densities, which checks, and the
//! parameters they are evaluated at.
//!
//! A config is validated as a whole before anything is computed, so a bad
//! parameter never surfaces halfway through a sweep.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tcost_core::family::sample_member;
use tcost_core::{Density, DensityFamily, FamilyKind, MetricMeasureSpace, TiltDirection};

use crate::error::{CliError, CliResult};
use crate::formats::{load_density, relative_to, SpaceFile};

const E: f64 = std::f64::consts::E;

/// Named groups of checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    TruncationEntropy,
    TruncatedEntropy,
    PowerEntropy,
    TruncationTransport,
    Tronc,
    Varent,
    BoundedDensity,
    SmallEntropy,
    Concentration,
    T2,
    Young,
    HolderOrlicz,
    GaugeBound,
    Hlogplus,
    LargeEntropy,
}

impl Suite {
    pub const ALL: [Suite; 15] = [
        Suite::TruncationEntropy,
        Suite::TruncatedEntropy,
        Suite::PowerEntropy,
        Suite::TruncationTransport,
        Suite::Tronc,
        Suite::Varent,
        Suite::BoundedDensity,
        Suite::SmallEntropy,
        Suite::Concentration,
        Suite::T2,
        Suite::Young,
        Suite::HolderOrlicz,
        Suite::GaugeBound,
        Suite::Hlogplus,
        Suite::LargeEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TruncationEntropy => "truncation-entropy",
            Suite::TruncatedEntropy => "truncated-entropy",
            Suite::PowerEntropy => "power-entropy",
            Suite::TruncationTransport => "truncation-transport",
            Suite::Tronc => "tronc",
            Suite::Varent => "varent",
            Suite::BoundedDensity => "bounded-density",
            Suite::SmallEntropy => "small-entropy",
            Suite::Concentration => "concentration",
            Suite::T2 => "t2",
            Suite::Young => "young",
            Suite::HolderOrlicz => "holder-orlicz",
            Suite::GaugeBound => "gauge-bound",
            Suite::Hlogplus => "hlogplus",
            Suite::LargeEntropy => "large-entropy",
        }
    }

    /// Suites that need a density population.
    pub fn needs_densities(self) -> bool {
        !matches!(self, Suite::Concentration | Suite::Young)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                CliError::parameter("suite", format!("unknown suite `{s}` (known: {})", known.join(", ")))
            })
    }
}

/// Parameters shared by the checks; unset fields take these defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Parameters {
    /// Transport exponent for single-exponent checks.
    pub p: f64,
    /// Exponents swept by the power-entropy check, each in `[1, 2)`.
    pub p_grid: Vec<f64>,
    pub alpha: f64,
    /// Truncation level.
    pub a: f64,
    /// Exponent of the entropy-dependent level `K = H^{-q}`.
    pub q: f64,
    /// Entropic regularization for the `wasserstein` command.
    pub eps_reg: f64,
    /// Candidate constant for the diagnostic bounds and concentration.
    #[serde(rename = "C")]
    pub c: f64,
    /// `C(α)` for the bounded-density check; estimated when absent.
    #[serde(rename = "C_alpha", skip_serializing_if = "Option::is_none")]
    pub c_alpha: Option<f64>,
    /// Radii for the concentration check.
    pub radii: Vec<f64>,
    /// Number of `(u, v)` points for the Young check.
    pub young_points: usize,
}

impl Default for Parameters {
    fn default() -> Self {
        Self {
            p: 2.0,
            p_grid: vec![1.0, 1.25, 1.5, 1.75, 1.95],
            alpha: 0.0,
            a: E * E,
            q: 0.5,
            eps_reg: 1e-3,
            c: 1.05,
            c_alpha: None,
            radii: vec![1.0, 1.5, 2.0, 2.5, 3.0],
            young_points: 1000,
        }
    }
}

fn positive_finite(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl Parameters {
    /// Range checks, including those only some suites need.
    pub fn validate(&self, suites: &[Suite]) -> CliResult<()> {
        let bad = |name: &str, reason: String| Err(CliError::parameter(name, reason));
        if !(1.0..=2.0).contains(&self.p) {
            return bad("p", format!("{} outside [1, 2]", self.p));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha", format!("{} outside [0, 1]", self.alpha));
        }
        if !(self.a.is_finite() && self.a > 1.0) {
            return bad("a", format!("truncation level must exceed 1, got {}", self.a));
        }
        if !positive_finite(self.q) {
            return bad("q", format!("need q > 0, got {}", self.q));
        }
        if !positive_finite(self.eps_reg) {
            return bad("eps_reg", format!("need eps_reg > 0, got {}", self.eps_reg));
        }
        if !positive_finite(self.c) {
            return bad("C", format!("need C > 0, got {}", self.c));
        }
        if let Some(c) = self.c_alpha {
            if !positive_finite(c) {
                return bad("C_alpha", format!("need C_alpha > 0, got {c}"));
            }
        }
        let needs = |s: Suite| suites.contains(&s);
        if needs(Suite::TruncationEntropy) && self.a <= E {
            return bad("a", format!("truncation-entropy needs a > e, got {}", self.a));
        }
        let small = [Suite::TruncatedEntropy, Suite::Tronc, Suite::Varent, Suite::SmallEntropy];
        if small.into_iter().any(needs) && self.a <= E.powf(1.5) {
            return bad("a", format!("small-entropy checks need a > e^(3/2), got {}", self.a));
        }
        if needs(Suite::PowerEntropy) {
            if self.p_grid.is_empty() {
                return bad("p_grid", "empty exponent grid".into());
            }
            if let Some(p) = self.p_grid.iter().find(|p| !(1.0..2.0).contains(*p)) {
                return bad("p_grid", format!("{p} outside [1, 2)"));
            }
        }
        if needs(Suite::Concentration) {
            if self.radii.is_empty() {
                return bad("radii", "no radii".into());
            }
            if let Some(r) = self.radii.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
                return bad("radii", format!("radius {r} must be finite and ≥ 0"));
            }
        }
        if needs(Suite::Young) && self.young_points == 0 {
            return bad("young_points", "need at least one point".into());
        }
        Ok(())
    }
}

/// A seeded population of densities. `kind = "mixed"` cycles through the
/// three generators by member index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: String,
    pub size: usize,
    /// Overrides the run seed for this family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_levels: Option<Vec<f64>>,
    /// `"mixed"` (default) or `"coordinate"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<String>,
}

const MIXED: [FamilyKind; 3] = [
    FamilyKind::ExponentialTilt,
    FamilyKind::Truncation,
    FamilyKind::IndicatorMixture,
];

impl FamilySpec {
    pub fn new(kind: &str, size: usize) -> Self {
        Self {
            kind: kind.into(),
            size,
            seed: None,
            scale_min: None,
            scale_max: None,
            cut_levels: None,
            direction: None,
        }
    }

    fn kinds(&self) -> CliResult<Vec<FamilyKind>> {
        if self.kind == "mixed" {
            return Ok(MIXED.to_vec());
        }
        FamilyKind::from_name(&self.kind).map(|k| vec![k]).ok_or_else(|| {
            CliError::parameter(
                "family.kind",
                format!(
                    "unknown kind `{}` (known: exponential-tilt, truncation, indicator-mixture, mixed)",
                    self.kind
                ),
            )
        })
    }

    /// One core family description per generator in use.
    pub fn resolve(&self, run_seed: u64) -> CliResult<Vec<DensityFamily>> {
        let direction = match self.direction.as_deref() {
            None | Some("mixed") => TiltDirection::Mixed,
            Some("coordinate") => TiltDirection::Coordinate,
            Some(other) => {
                return Err(CliError::parameter(
                    "family.direction",
                    format!("unknown direction `{other}` (known: mixed, coordinate)"),
                ))
            }
        };
        if self.size == 0 {
            return Err(CliError::parameter("family.size", "need at least one member"));
        }
        self.kinds()?
            .into_iter()
            .map(|kind| {
                let mut spec = DensityFamily::new(kind, self.seed.unwrap_or(run_seed), self.size).with_direction(direction);
                let (lo, hi) = (self.scale_min.unwrap_or(spec.scale_min), self.scale_max.unwrap_or(spec.scale_max));
                spec = spec.with_scales(lo, hi);
                if let Some(levels) = &self.cut_levels {
                    spec = spec.with_cut_levels(levels.clone());
                }
                spec.validate()?;
                Ok(spec)
            })
            .collect()
    }

    /// Member `k` comes from generator `k mod (number of generators)` with
    /// its own `(seed, k)` stream, so members are independent of each other.
    pub fn sample(&self, space: &MetricMeasureSpace, run_seed: u64) -> CliResult<Vec<Density>> {
        let specs = self.resolve(run_seed)?;
        (0..self.size)
            .map(|k| Ok(sample_member(space, &specs[k % specs.len()], k)?))
            .collect()
    }
}

/// A space given inline or by path (relative to the config file).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceSource {
    Path(String),
    Inline(SpaceFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Free-form label echoed into the report.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Version of the configuration itself (not of the tool).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u32>,
    pub space: SpaceSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub densities: Vec<String>,
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub params: Parameters,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.suites.is_empty() {
            return Err(CliError::parameter("suites", "empty suite list"));
        }
        let mut seen = self.suites.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::parameter("suites", "a suite is listed twice"));
        }
        self.params.validate(&self.suites)?;
        if let Some(f) = &self.family {
            f.resolve(self.seed)?;
        }
        let need = self.suites.iter().any(|s| s.needs_densities());
        if need && self.family.is_none() && self.densities.is_empty() {
            return Err(CliError::parameter("family", "these suites need a family or density files"));
        }
        Ok(())
    }

    /// Builds the space; `origin` is the config file, if any.
    pub fn load_space(&self, origin: Option<&Path>) -> CliResult<MetricMeasureSpace> {
        match &self.space {
            SpaceSource::Path(p) => crate::formats::load_space(&relative_to(origin, p)),
            SpaceSource::Inline(s) => s.build(origin.unwrap_or(Path::new("<inline space>"))),
        }
    }

    /// Family members first, then density files in the order given.
    pub fn load_densities(&self, space: &MetricMeasureSpace, origin: Option<&Path>) -> CliResult<Vec<Density>> {
        let mut out = match &self.family {
            Some(f) => f.sample(space, self.seed)?,
            None => Vec::new(),
        };
        for p in &self.densities {
            let path: PathBuf = relative_to(origin, p);
            out.push(load_density(space, &path)?);
        }
        Ok(out)
    }
}
