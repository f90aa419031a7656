//! Certification of exact support and vector recovery conditions.
//!
//! Everything here evaluates inequalities on the Gram matrix of a
//! unit-column measurement matrix, never on the matrix itself, so the same
//! generic code runs in `f64` and in exact rational arithmetic. The module
//! splits into:
//!
//! * [`dominance`]: the score-dominance engine shared by every
//!   fixed-support condition (strict max-score comparisons over sign
//!   orthants, decided through linear-inequality alternatives);
//! * [`fixed_support`]: dispatch over the constraint/support-size table of
//!   decidable recovery conditions, with per-condition reports;
//! * [`constants`]: sparsity-class constants, the sampled falsifier for the
//!   greedy selection inequality, per-instance certificates, and
//!   perturbation stability;
//! * [`counterexample`]: the packaged four-column fixture verification,
//!   including its boundary equality and the tie that separates greedy
//!   success from the classical sufficient condition.

pub mod constants;
pub mod counterexample;
pub mod dominance;
pub mod fixed_support;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constraint::ConstraintError;
use crate::linalg::LinalgError;
use crate::lp::LpError;
use crate::solver::SolverError;

pub use constants::{
    condition_h_falsify, condition_h_margin, instance_certificate, perturbation_stability,
    recovery_constants, DeltaHat, FalsifyReport, InstanceCertificate, PerturbationReport,
    RecoveryConstants,
};
pub use counterexample::{verify_counterexample, CounterexampleReport};
pub use dominance::{motzkin_dominance, RowKind, ScoreSystem};
pub use fixed_support::{
    check_fixed_support, check_fixed_support_exact, erc_norm, erc_norm_exact, FixedSupportReport,
};

/// Half-width of the band around zero inside which a margin is reported as
/// a boundary case instead of a strict holds/fails decision (float mode;
/// exact mode flags only an exact zero).
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Outcome of one certified condition or of an aggregate of conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// The condition holds with a strict margin.
    Holds,
    /// The condition fails, with a re-verifiable witness attached.
    Fails,
    /// No decision procedure is available; sampling found no violation.
    UndecidedSampled,
}

/// State of an individual margin: strict sign or boundary band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginState {
    Holds,
    Fails,
    Boundary,
}

/// A named inequality slack. Positive means the strict inequality holds
/// by that amount; the state is `Boundary` when the value sits inside the
/// tolerance band and the sign is therefore not trustworthy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub value: f64,
    pub state: MarginState,
}

impl Margin {
    /// Classifies `value` against a band half-width (`0.0` collapses the
    /// band so only an exact zero is a boundary).
    pub fn from_value(value: f64, band: f64) -> Self {
        let state = if value.abs() <= band {
            MarginState::Boundary
        } else if value > 0.0 {
            MarginState::Holds
        } else {
            MarginState::Fails
        };
        Margin { value, state }
    }
}

/// Witness data attached to a failing (or boundary) condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    /// A plain vector, e.g. a direction violating an injectivity bound.
    Vector(Vec<f64>),
    /// A single offending column index.
    Index(usize),
    /// A point of the quantified region at which the dominated side wins:
    /// restricted coefficient vector `v`, the sign pattern of its
    /// sign-free coordinates, the competing column, and, for subset-indexed
    /// conditions, the subset at which the failure occurred.
    Dominance {
        v: Vec<f64>,
        sigma: Vec<i8>,
        target: usize,
        subset: Option<Vec<usize>>,
    },
    /// A sampled instance violating the greedy selection inequality:
    /// target vector `u`, the already-selected index set, and the
    /// restricted minimizer at that set.
    Instance {
        u: Vec<f64>,
        j_set: Vec<usize>,
        v: Vec<f64>,
    },
}

/// Structured verdict for one named recovery condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition_id: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(rename = "margins")]
    pub numeric_margins: BTreeMap<String, Margin>,
}

impl ConditionReport {
    pub fn new(condition_id: impl Into<String>, verdict: Verdict) -> Self {
        ConditionReport {
            condition_id: condition_id.into(),
            verdict,
            witness: None,
            numeric_margins: BTreeMap::new(),
        }
    }

    pub fn with_margin(mut self, name: impl Into<String>, margin: Margin) -> Self {
        self.numeric_margins.insert(name.into(), margin);
        self
    }
}

/// Errors from the certification layer.
#[derive(Debug)]
pub enum CertifyError {
    /// The (constraint, support-size) pair is outside the decidable table.
    UnsupportedCombination(String),
    /// A support-restricted Gram block is singular where the condition
    /// needs it invertible.
    RankDeficient(String),
    /// A float-mode linear program landed in the ambiguity band; rerun in
    /// exact mode or loosen the policy.
    NumericallyAmbiguous(String),
    /// An enumeration would exceed the configured budget.
    BudgetExceeded { needed: u128, budget: u128 },
    /// The constraint set has a coordinate slice equal to `{0}`, so it is
    /// not irreducible and per-instance certificates do not apply.
    NotIrreducible,
    /// Invalid arguments (empty support, index out of range, shape).
    BadInput(String),
    /// A packaged-fixture assertion failed; `item` names the failing step.
    Assertion { item: &'static str, detail: String },
    Lp(LpError),
    Linalg(LinalgError),
    Solver(SolverError),
    Constraint(ConstraintError),
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::UnsupportedCombination(msg) => {
                write!(f, "unsupported constraint/support combination: {msg}")
            }
            CertifyError::RankDeficient(msg) => write!(f, "rank-deficient block: {msg}"),
            CertifyError::NumericallyAmbiguous(msg) => {
                write!(f, "numerically ambiguous comparison: {msg}")
            }
            CertifyError::BudgetExceeded { needed, budget } => {
                write!(f, "enumeration needs {needed} units, budget is {budget}")
            }
            CertifyError::NotIrreducible => {
                write!(f, "constraint set has a degenerate {{0}} coordinate slice")
            }
            CertifyError::BadInput(msg) => write!(f, "bad input: {msg}"),
            CertifyError::Assertion { item, detail } => {
                write!(f, "fixture verification failed at {item}: {detail}")
            }
            CertifyError::Lp(e) => write!(f, "lp: {e}"),
            CertifyError::Linalg(e) => write!(f, "linalg: {e}"),
            CertifyError::Solver(e) => write!(f, "solver: {e}"),
            CertifyError::Constraint(e) => write!(f, "constraint: {e}"),
        }
    }
}

impl std::error::Error for CertifyError {}

impl From<LpError> for CertifyError {
    fn from(e: LpError) -> Self {
        CertifyError::Lp(e)
    }
}

impl From<LinalgError> for CertifyError {
    fn from(e: LinalgError) -> Self {
        CertifyError::Linalg(e)
    }
}

impl From<SolverError> for CertifyError {
    fn from(e: SolverError) -> Self {
        CertifyError::Solver(e)
    }
}

impl From<ConstraintError> for CertifyError {
    fn from(e: ConstraintError) -> Self {
        CertifyError::Constraint(e)
    }
}
