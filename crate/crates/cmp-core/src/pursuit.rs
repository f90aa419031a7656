//! The constrained greedy pursuit loop.
//!
//! Starting from `x⁰ = 0` with an empty working set, each step scores every
//! coordinate by the best one-coordinate move that stays inside the
//! constraint set, adds a minimizing index to the working set, and refits
//! over the enlarged support with [`solve_restricted`]. A branch-all mode
//! enumerates every run compatible with score ties (and with non-unique
//! refits on the nonconvex demo set), which is what the recovery
//! definitions quantify over.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::error::Error;
use std::fmt;

use crate::constraint::{ConstraintError, ConstraintModel, ExtendedInterval};
use crate::linalg::{dot, norm2, norm2_sq, MeasurementMatrix};
use crate::policy::NumericPolicy;
use crate::solver::{solve_restricted, SolverError};

/// A refit that fails to shave more than this off the squared residual
/// terminates the run as stalled.
pub const STALL_EPS: f64 = 1e-14;

/// Default cap on enumerated branches in branch-all mode.
pub const DEFAULT_MAX_BRANCHES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum PursuitError {
    Solver(SolverError),
    Constraint(ConstraintError),
    /// Branch-all enumeration exceeded its budget.
    BranchLimit { limit: usize },
    BadInput(String),
}

impl fmt::Display for PursuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PursuitError::Solver(e) => write!(f, "refit failed: {e}"),
            PursuitError::Constraint(e) => write!(f, "constraint query failed: {e}"),
            PursuitError::BranchLimit { limit } => {
                write!(f, "tie enumeration exceeded {limit} branches")
            }
            PursuitError::BadInput(msg) => write!(f, "bad input: {msg}"),
        }
    }
}

impl Error for PursuitError {}

impl From<SolverError> for PursuitError {
    fn from(e: SolverError) -> Self {
        PursuitError::Solver(e)
    }
}

impl From<ConstraintError> for PursuitError {
    fn from(e: ConstraintError) -> Self {
        PursuitError::Constraint(e)
    }
}

/// Outcome of scoring one coordinate move from the current iterate.
///
/// `t_tilde` is the unconstrained one-dimensional minimizer
/// `⟨r, A_j⟩ / ‖A_j‖²`, `t_star` its clamp into the admissible interval, and
/// `g_star` the resulting objective `min_t ‖y − A(x + t·e_j)‖²`. Since the
/// interval always contains zero, `g_star` never exceeds the current squared
/// residual (up to roundoff).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateScore {
    pub j: usize,
    pub t_tilde: f64,
    pub t_star: f64,
    pub g_star: f64,
    pub interval: ExtendedInterval,
}

/// How a run decides among tied scores. Branch-all mode explores every tied
/// index instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TieRule {
    #[default]
    LowestIndex,
}

/// Knobs for a single deterministic run. `None` fields take the documented
/// defaults: `max_iter = min(m, N)` and `residual_tol = 1e-10 · ‖y‖`.
#[derive(Debug, Clone, Default)]
pub struct PursuitConfig {
    pub max_iter: Option<usize>,
    pub residual_tol: Option<f64>,
    pub tie_rule: TieRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    ResidualTol,
    MaxIter,
    Stall,
}

/// One step of a run: scores for every coordinate, the selected index, the
/// working set and iterate after the refit, and whether that refit was
/// certified unique.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    pub scores: Vec<CoordinateScore>,
    pub chosen: usize,
    /// All indices within the tie window at this step.
    pub tied: Vec<usize>,
    pub j_set: Vec<usize>,
    pub x: Vec<f64>,
    pub residual_sq: f64,
    pub refit_unique: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PursuitTrace {
    pub steps: Vec<StepRecord>,
    pub terminated_by: Termination,
}

impl PursuitTrace {
    /// Working set after the last step (empty when no step ran).
    pub fn final_support(&self) -> Vec<usize> {
        self.steps.last().map(|s| s.j_set.clone()).unwrap_or_default()
    }

    pub fn final_x(&self, n: usize) -> Vec<f64> {
        self.steps.last().map(|s| s.x.clone()).unwrap_or_else(|| vec![0.0; n])
    }

    pub fn final_residual_sq(&self, y: &[f64]) -> f64 {
        self.steps
            .last()
            .map(|s| s.residual_sq)
            .unwrap_or_else(|| norm2_sq(y))
    }
}

/// Score a single coordinate move from iterate `x`.
pub fn coordinate_score(
    a: &MeasurementMatrix,
    y: &[f64],
    model: &ConstraintModel,
    x: &[f64],
    j: usize,
    policy: &NumericPolicy,
) -> Result<CoordinateScore, ConstraintError> {
    let ax = a.mul_vec(x);
    let resid: Vec<f64> = y.iter().zip(ax.iter()).map(|(&v, &w)| v - w).collect();
    let resid_sq = norm2_sq(&resid);
    score_one(a, &resid, resid_sq, model, x, j, policy)
}

fn score_one(
    a: &MeasurementMatrix,
    resid: &[f64],
    resid_sq: f64,
    model: &ConstraintModel,
    x: &[f64],
    j: usize,
    policy: &NumericPolicy,
) -> Result<CoordinateScore, ConstraintError> {
    let interval = model.interval_at(x, j, policy)?;
    let cn = a.column_norm(j);
    let nn = cn * cn;
    let t_tilde = dot(resid, a.col(j)) / nn;
    let lo = interval.lo;
    let hi = interval.hi;
    // Three-branch closed form: the 1-D objective is
    // ‖r‖² − ‖A_j‖²(2t·t̃ − t²), minimized at the clamped t̃.
    let (t_star, g_star) = if t_tilde <= lo {
        (lo, resid_sq - nn * (2.0 * lo * t_tilde - lo * lo))
    } else if t_tilde >= hi {
        (hi, resid_sq - nn * (2.0 * hi * t_tilde - hi * hi))
    } else {
        (t_tilde, resid_sq - nn * t_tilde * t_tilde)
    };
    Ok(CoordinateScore {
        j,
        t_tilde,
        t_star,
        g_star,
        interval,
    })
}

fn score_all(
    a: &MeasurementMatrix,
    y: &[f64],
    model: &ConstraintModel,
    x: &[f64],
    policy: &NumericPolicy,
) -> Result<(Vec<CoordinateScore>, f64), ConstraintError> {
    let ax = a.mul_vec(x);
    let resid: Vec<f64> = y.iter().zip(ax.iter()).map(|(&v, &w)| v - w).collect();
    let resid_sq = norm2_sq(&resid);
    let mut scores = Vec::with_capacity(a.n_cols());
    for j in 0..a.n_cols() {
        scores.push(score_one(a, &resid, resid_sq, model, x, j, policy)?);
    }
    Ok((scores, resid_sq))
}

/// All indices whose score lies within the relative tie window
/// `min + tie_tol·(1 + min)`, in ascending index order.
pub fn select_index(scores: &[CoordinateScore], tie_tol: f64) -> Vec<usize> {
    let Some(min) = scores
        .iter()
        .map(|s| s.g_star)
        .min_by(|p, q| p.partial_cmp(q).unwrap())
    else {
        return vec![];
    };
    let window = min + tie_tol * (1.0 + min.abs());
    scores
        .iter()
        .filter(|s| s.g_star <= window)
        .map(|s| s.j)
        .collect()
}

fn check_shapes(
    a: &MeasurementMatrix,
    y: &[f64],
    model: &ConstraintModel,
) -> Result<(), PursuitError> {
    if y.len() != a.rows() {
        return Err(PursuitError::BadInput(format!(
            "observation has length {} but the matrix has {} rows",
            y.len(),
            a.rows()
        )));
    }
    if model.n() != a.n_cols() {
        return Err(PursuitError::BadInput(format!(
            "constraint set lives in dimension {} but the matrix has {} columns",
            model.n(),
            a.n_cols()
        )));
    }
    Ok(())
}

/// One deterministic run of the pursuit.
pub fn cmp_run(
    a: &MeasurementMatrix,
    y: &[f64],
    model: &ConstraintModel,
    config: &PursuitConfig,
    policy: &NumericPolicy,
) -> Result<PursuitTrace, PursuitError> {
    check_shapes(a, y, model)?;
    let TieRule::LowestIndex = config.tie_rule;
    let max_iter = config.max_iter.unwrap_or_else(|| a.rows().min(a.n_cols()));
    let residual_tol = config.residual_tol.unwrap_or_else(|| 1e-10 * norm2(y));

    let n = a.n_cols();
    let mut x = vec![0.0; n];
    let mut j_set: Vec<usize> = Vec::new();
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut resid_sq = norm2_sq(y);
    let mut terminated_by = Termination::MaxIter;

    for k in 1..=max_iter {
        if resid_sq.max(0.0).sqrt() <= residual_tol {
            terminated_by = Termination::ResidualTol;
            break;
        }
        let (scores, current_sq) = score_all(a, y, model, &x, policy)?;
        let tied = select_index(&scores, policy.tie_tol);
        let chosen = tied[0];
        if !j_set.contains(&chosen) {
            j_set.push(chosen);
            j_set.sort_unstable();
        }
        let sol = solve_restricted(a, y, model, &j_set, policy)?;
        x = sol.x.clone();
        resid_sq = sol.objective;
        steps.push(StepRecord {
            k,
            scores,
            chosen,
            tied,
            j_set: j_set.clone(),
            x: sol.x,
            residual_sq: resid_sq,
            refit_unique: sol.unique,
        });
        if current_sq - resid_sq <= STALL_EPS {
            terminated_by = Termination::Stall;
            break;
        }
    }
    if terminated_by == Termination::MaxIter && resid_sq.max(0.0).sqrt() <= residual_tol {
        terminated_by = Termination::ResidualTol;
    }
    Ok(PursuitTrace {
        steps,
        terminated_by,
    })
}

/// Branch-all configuration: run exactly `max_depth` steps along every
/// branch, giving up past `max_branches` completed paths.
#[derive(Debug, Clone)]
pub struct BranchConfig {
    pub max_depth: usize,
    pub max_branches: usize,
}

impl BranchConfig {
    pub fn new(max_depth: usize) -> Self {
        BranchConfig {
            max_depth,
            max_branches: DEFAULT_MAX_BRANCHES,
        }
    }
}

/// Enumerate every run of exactly `max_depth` steps compatible with the tie
/// window, branching additionally over the two segment endpoints when a
/// refit on the nonconvex demo set is non-unique. No early stopping: the
/// recovery definitions quantify over sequences of fixed length, including
/// steps that cannot reduce the residual. Traces are deduplicated by their
/// working-set sequence.
pub fn cmp_run_all_branches(
    a: &MeasurementMatrix,
    y: &[f64],
    model: &ConstraintModel,
    config: &BranchConfig,
    policy: &NumericPolicy,
) -> Result<Vec<PursuitTrace>, PursuitError> {
    check_shapes(a, y, model)?;
    let n = a.n_cols();
    let mut out: Vec<PursuitTrace> = Vec::new();
    let mut seen: HashSet<Vec<Vec<usize>>> = HashSet::new();
    let mut completed = 0usize;

    struct Frame {
        x: Vec<f64>,
        j_set: Vec<usize>,
        steps: Vec<StepRecord>,
    }

    let mut stack = vec![Frame {
        x: vec![0.0; n],
        j_set: vec![],
        steps: vec![],
    }];

    while let Some(frame) = stack.pop() {
        if frame.steps.len() == config.max_depth {
            completed += 1;
            if completed > config.max_branches {
                return Err(PursuitError::BranchLimit {
                    limit: config.max_branches,
                });
            }
            let key: Vec<Vec<usize>> = frame.steps.iter().map(|s| s.j_set.clone()).collect();
            if seen.insert(key) {
                out.push(PursuitTrace {
                    steps: frame.steps,
                    terminated_by: Termination::MaxIter,
                });
            }
            continue;
        }
        let k = frame.steps.len() + 1;
        let (scores, _) = score_all(a, y, model, &frame.x, policy)?;
        let tied = select_index(&scores, policy.tie_tol);
        for &chosen in tied.iter().rev() {
            let mut j_set = frame.j_set.clone();
            if !j_set.contains(&chosen) {
                j_set.push(chosen);
                j_set.sort_unstable();
            }
            let sol = solve_restricted(a, y, model, &j_set, policy)?;
            // Non-unique demo refits: the minimizer set is a segment; both
            // endpoints continue as separate branches.
            let mut iterates: Vec<Vec<f64>> = vec![sol.x.clone()];
            if !sol.unique && *model == ConstraintModel::NonconvexDemo {
                if let Some((p, q)) =
                    crate::oracle::nonconvex_line7_solve(a, y, &j_set, policy)?.segment
                {
                    iterates = vec![p, q];
                }
            }
            for x_next in iterates {
                let mut steps = frame.steps.clone();
                steps.push(StepRecord {
                    k,
                    scores: scores.clone(),
                    chosen,
                    tied: tied.clone(),
                    j_set: j_set.clone(),
                    x: x_next.clone(),
                    residual_sq: sol.objective,
                    refit_unique: sol.unique,
                });
                stack.push(Frame {
                    x: x_next,
                    j_set: j_set.clone(),
                    steps,
                });
            }
        }
    }
    Ok(out)
}

/// Verdict of replaying the pursuit against a known admissible vector.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryCheck {
    /// Every branch reaches exactly `supp(z)` after `|supp(z)|` steps.
    pub support_recovered: bool,
    /// Support recovery plus a certified-unique final refit matching `z`.
    pub vector_recovered: bool,
    pub traces: Vec<PursuitTrace>,
}

/// Run every branch for exactly `|supp(z)|` steps on `y = Az` and compare
/// the outcomes against `z`.
pub fn verify_exact_recovery(
    a: &MeasurementMatrix,
    z: &[f64],
    model: &ConstraintModel,
    max_branches: usize,
    policy: &NumericPolicy,
) -> Result<RecoveryCheck, PursuitError> {
    if z.len() != a.n_cols() {
        return Err(PursuitError::BadInput(format!(
            "target has length {} but the matrix has {} columns",
            z.len(),
            a.n_cols()
        )));
    }
    if !model.contains(z, policy) {
        return Err(PursuitError::BadInput(
            "target vector is not a member of the constraint set".to_string(),
        ));
    }
    let supp: Vec<usize> = z
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, _)| i)
        .collect();
    let r = supp.len();
    if r == 0 {
        return Ok(RecoveryCheck {
            support_recovered: true,
            vector_recovered: true,
            traces: vec![],
        });
    }
    let y = a.mul_vec(z);
    let traces = cmp_run_all_branches(
        a,
        &y,
        model,
        &BranchConfig {
            max_depth: r,
            max_branches,
        },
        policy,
    )?;

    let z_scale = 1.0 + z.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut support_recovered = true;
    let mut vector_recovered = true;
    for trace in &traces {
        let last = trace.steps.last().expect("depth ≥ 1 leaves steps nonempty");
        if last.j_set != supp {
            support_recovered = false;
            vector_recovered = false;
            continue;
        }
        let err = last
            .x
            .iter()
            .zip(z.iter())
            .map(|(&p, &q)| (p - q).abs())
            .fold(0.0, f64::max);
        if !last.refit_unique || err > 1e-7 * z_scale {
            vector_recovered = false;
        }
    }
    Ok(RecoveryCheck {
        support_recovered,
        vector_recovered,
        traces,
    })
}
