//! Uniform result record for every checked inequality.

use alloc::string::String;

/// Parameters a check was evaluated at; unused ones stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Params {
    /// Truncation level.
    pub a: Option<f64>,
    /// Exponent.
    pub p: Option<f64>,
    pub alpha: Option<f64>,
    /// Density bound or truncation level `H^{-q}`.
    pub k: Option<f64>,
    pub q: Option<f64>,
    /// Supplied constant.
    pub c: Option<f64>,
    /// Distance radius.
    pub r: Option<f64>,
}

/// Whether a failed margin is a genuine violation or only data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckKind {
    /// A statement that holds for every admissible input on a finite space.
    Assertion,
    /// A continuum statement evaluated on a discretization; margins are
    /// reported, never enforced.
    Diagnostic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    OutOfDomain,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::OutOfDomain => "out-of-domain",
        }
    }
}

/// `lhs ≤ rhs` evaluated once. `margin = rhs - lhs` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub params: Params,
    /// Index of the density or function inside its family, set by sweeps.
    pub witness: Option<usize>,
    pub kind: CheckKind,
    /// Arithmetic slack tolerated before a negative margin counts as failure.
    pub slack: f64,
    pub in_domain: bool,
}

impl InequalityReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, kind: CheckKind, slack: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            params: Params::default(),
            witness: None,
            kind,
            slack,
            in_domain: true,
        }
    }

    /// A report whose preconditions do not hold; sides are `NaN`.
    pub fn out_of_domain(name: impl Into<String>, kind: CheckKind) -> Self {
        Self {
            in_domain: false,
            ..Self::new(name, f64::NAN, f64::NAN, kind, 0.0)
        }
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn with_witness(mut self, witness: usize) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn status(&self) -> Status {
        if !self.in_domain {
            Status::OutOfDomain
        } else if self.margin >= -self.slack {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// True when this report should fail a run.
    pub fn is_violation(&self) -> bool {
        self.kind == CheckKind::Assertion && self.status() == Status::Fail
    }
}
