//! Independent reference solvers used to cross-check the main pipeline.
//!
//! Everything here is deliberately built on different algorithmic routes
//! than the production code: exhaustive enumeration, dense grids, and plain
//! normal equations. Tests compare the two sides; the oracles never call
//! back into the code they are checking beyond the shared matrix type.

use std::error::Error;
use std::fmt;

use itertools::Itertools;

use crate::constraint::ConstraintModel;
use crate::linalg::{dot, gauss_solve, norm2, norm2_sq, LinalgError, MeasurementMatrix};
use crate::policy::NumericPolicy;
use crate::solver::SolverError;

/// Default subset budget for the exhaustive sparsest-solution search.
pub const DEFAULT_L0_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// The subset enumeration would exceed the allowed budget.
    BudgetExceeded { evaluated: usize, budget: usize },
    /// No feasible vector with the requested sparsity reproduces `y`.
    NoSolutionWithinKmax { k_max: usize },
    /// A restricted solve failed underneath the enumeration.
    Solver(SolverError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BudgetExceeded { evaluated, budget } => {
                write!(f, "subset budget exceeded: {evaluated} of {budget} allowed")
            }
            OracleError::NoSolutionWithinKmax { k_max } => {
                write!(f, "no admissible solution with support size up to {k_max}")
            }
            OracleError::Solver(e) => write!(f, "restricted solve failed: {e}"),
        }
    }
}

impl Error for OracleError {}

impl From<SolverError> for OracleError {
    fn from(e: SolverError) -> Self {
        OracleError::Solver(e)
    }
}

/// Sparsest admissible solutions of `Ax = y` found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct L0Solution {
    /// Smallest support size at which the observation is reproduced.
    pub cardinality: usize,
    /// Every support of that size whose restricted solve reaches `y`.
    pub supports: Vec<Vec<usize>>,
    /// One minimizer per listed support.
    pub representatives: Vec<Vec<f64>>,
}

/// Exhaustive minimum-support search: try every support of size 0, 1, …,
/// `k_max` (counting against `budget`) and return the first cardinality at
/// which some restricted solve reproduces `y` within
/// `1e-8 · (1 + ‖y‖)` in residual norm.
pub fn l0_brute(
    a: &MeasurementMatrix,
    y: &[f64],
    model: &ConstraintModel,
    k_max: usize,
    budget: usize,
    policy: &NumericPolicy,
) -> Result<L0Solution, OracleError> {
    let n = a.n_cols();
    let feas_tol = 1e-8 * (1.0 + norm2(y));
    let mut evaluated = 0usize;

    for k in 0..=k_max.min(n) {
        let level: usize = n_choose_k(n, k);
        if evaluated.saturating_add(level) > budget {
            return Err(OracleError::BudgetExceeded {
                evaluated: evaluated + level,
                budget,
            });
        }
        evaluated += level;
        let mut supports = Vec::new();
        let mut representatives = Vec::new();
        for combo in (0..n).combinations(k) {
            let sol = crate::solver::solve_restricted(a, y, model, &combo, policy)?;
            if sol.objective.max(0.0).sqrt() <= feas_tol {
                supports.push(combo);
                representatives.push(sol.x);
            }
        }
        if !supports.is_empty() {
            return Ok(L0Solution {
                cardinality: k,
                supports,
                representatives,
            });
        }
    }
    Err(OracleError::NoSolutionWithinKmax { k_max })
}

fn n_choose_k(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Global minimizer over the two-coordinate nonconvex demo set.
#[derive(Debug, Clone, PartialEq)]
pub struct NonconvexSolution {
    /// Representative minimizer. When the optimum is a segment this is the
    /// endpoint with the smaller first coordinate.
    pub x: Vec<f64>,
    /// Squared residual at the optimum.
    pub objective: f64,
    /// Inclusive endpoints of the optimal segment, ordered by the first
    /// coordinate, when the minimizer set is one-dimensional.
    pub segment: Option<(Vec<f64>, Vec<f64>)>,
}

/// Solve `min ‖Aw − y‖²` over the nonconvex demo set restricted to `j`.
///
/// The demo set is the union of the region below the square curve
/// (`0 ≤ w₁ ≤ w₂²`, `w₂ ≤ 1`) and the base segment (`w₂ = 0`,
/// `0 ≤ w₁ ≤ 1`). The search is exhaustive over the faces of both branches
/// (closed-form one-dimensional clamps, a golden-section refine along the
/// curved face, a dense sanity grid) plus segment recovery along the null
/// direction when the matrix is rank deficient.
pub fn nonconvex_line7_solve(
    a: &MeasurementMatrix,
    y: &[f64],
    j: &[usize],
    policy: &NumericPolicy,
) -> Result<NonconvexSolution, SolverError> {
    if a.n_cols() != 2 {
        return Err(SolverError::BadInput(format!(
            "the demo set lives in two coordinates, matrix has {}",
            a.n_cols()
        )));
    }
    let mut idx: Vec<usize> = j.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if idx.iter().any(|&jj| jj >= 2) {
        return Err(SolverError::BadInput("support index out of range".into()));
    }
    let c0 = a.col(0);
    let c1 = a.col(1);

    // Single-coordinate slices are plain interval clamps.
    let clamp_1d = |col: &[f64], lo: f64, hi: f64| -> f64 {
        let nn = norm2_sq(col);
        (dot(col, y) / nn).clamp(lo, hi)
    };
    match idx.as_slice() {
        [] => {
            return Ok(NonconvexSolution {
                x: vec![0.0, 0.0],
                objective: norm2_sq(y),
                segment: None,
            })
        }
        [0] => {
            // Points (t, 0) lie on the base segment, so t ranges over [0, 1].
            let t = clamp_1d(c0, 0.0, 1.0);
            let x = vec![t, 0.0];
            let objective = residual_sq(a, &x, y);
            return Ok(NonconvexSolution {
                x,
                objective,
                segment: None,
            });
        }
        [1] => {
            let t = clamp_1d(c1, 0.0, 1.0);
            let x = vec![0.0, t];
            let objective = residual_sq(a, &x, y);
            return Ok(NonconvexSolution {
                x,
                objective,
                segment: None,
            });
        }
        _ => {}
    }

    let obj = |x1: f64, x2: f64| -> f64 {
        let mut s = 0.0;
        for r in 0..a.rows() {
            let v = c0[r] * x1 + c1[r] * x2 - y[r];
            s += v * v;
        }
        s
    };
    let model = ConstraintModel::NonconvexDemo;
    let feasible = |x1: f64, x2: f64| model.contains(&[x1, x2], policy);

    let mut best = (0.0f64, 0.0f64, obj(0.0, 0.0));
    let mut consider = |x1: f64, x2: f64| {
        if feasible(x1, x2) {
            let v = obj(x1, x2);
            if v < best.2 {
                best = (x1, x2, v);
            }
        }
    };

    // Unconstrained stationary point, when the normal system is solvable.
    let g = vec![
        vec![norm2_sq(c0), dot(c0, c1)],
        vec![dot(c0, c1), norm2_sq(c1)],
    ];
    let b = vec![dot(c0, y), dot(c1, y)];
    let fro = (g[0][0] + g[1][1]).max(1.0);
    if let Ok(sol) = gauss_solve(&g, &[b], &(1e-12 * fro)) {
        consider(sol[0][0], sol[0][1]);
    }

    // Straight faces: base segment, left edge, top edge.
    consider(clamp_1d(c0, 0.0, 1.0), 0.0);
    consider(0.0, clamp_1d(c1, 0.0, 1.0));
    {
        let shifted: Vec<f64> = y.iter().zip(c1.iter()).map(|(&v, &w)| v - w).collect();
        let nn = norm2_sq(c0);
        let s = (dot(c0, &shifted) / nn).clamp(0.0, 1.0);
        consider(s, 1.0);
    }

    // Curved face (t², t) for t in [0, 1]: dense bracket plus golden refine.
    let phi = |t: f64| obj(t * t, t);
    let grid_n = 400usize;
    let mut best_t = 0.0;
    let mut best_phi = phi(0.0);
    for i in 1..=grid_n {
        let t = i as f64 / grid_n as f64;
        let v = phi(t);
        if v < best_phi {
            best_phi = v;
            best_t = t;
        }
    }
    let cell = 1.0 / grid_n as f64;
    let t_star = golden_min(&phi, (best_t - cell).max(0.0), (best_t + cell).min(1.0));
    consider(t_star * t_star, t_star);

    // Dense sanity grid over the bounding box.
    let sweep = 400usize;
    for i in 0..=sweep {
        for k in 0..=sweep {
            let x1 = 1.5 * i as f64 / sweep as f64;
            let x2 = 1.5 * k as f64 / sweep as f64;
            if feasible(x1, x2) {
                let v = obj(x1, x2);
                if v < best.2 {
                    best = (x1, x2, v);
                }
            }
        }
    }

    // Segment recovery: when A has a null direction the minimizer set is the
    // feasible piece of a line; walk it from the best point and bisect the
    // boundary crossings.
    let mut segment = None;
    let denom = g[0][0].max(g[1][1]).max(1e-300);
    let det = g[0][0] * g[1][1] - g[0][1] * g[0][1];
    if det <= policy.rank_tol * denom * denom {
        let d = null_direction(c0, c1);
        let walk = |sign: f64| -> f64 {
            let step = 1e-3;
            let mut t_in = 0.0f64;
            let mut t_out = None;
            let mut t = step;
            while t <= 4.0 {
                let x1 = best.0 + sign * t * d.0;
                let x2 = best.1 + sign * t * d.1;
                if feasible(x1, x2) {
                    t_in = t;
                } else {
                    t_out = Some(t);
                    break;
                }
                t += step;
            }
            let Some(mut hi) = t_out else {
                return t_in;
            };
            let mut lo = t_in;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible(best.0 + sign * mid * d.0, best.1 + sign * mid * d.1) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        let t_fwd = walk(1.0);
        let t_bwd = walk(-1.0);
        if t_fwd + t_bwd > 1e-9 {
            let p = (best.0 + t_fwd * d.0, best.1 + t_fwd * d.1);
            let q = (best.0 - t_bwd * d.0, best.1 - t_bwd * d.1);
            let (first, second) = if p.0 < q.0 || (p.0 == q.0 && p.1 <= q.1) {
                (p, q)
            } else {
                (q, p)
            };
            best = (first.0, first.1, obj(first.0, first.1));
            segment = Some((vec![first.0, first.1], vec![second.0, second.1]));
        }
    }

    Ok(NonconvexSolution {
        x: vec![best.0, best.1],
        objective: best.2,
        segment,
    })
}

fn residual_sq(a: &MeasurementMatrix, x: &[f64], y: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    ax.iter()
        .zip(y.iter())
        .map(|(&p, &q)| (p - q) * (p - q))
        .sum()
}

/// Unit vector spanning the (approximate) null space of a two-column matrix.
fn null_direction(c0: &[f64], c1: &[f64]) -> (f64, f64) {
    // A(d₀, d₁) = d₀c₀ + d₁c₁ ≈ 0; with dependent columns c₁ = λc₀ the
    // direction (λ, −1) works, scaled to unit length. Pick the formulation
    // with the better-conditioned denominator.
    let n0 = norm2_sq(c0);
    let n1 = norm2_sq(c1);
    let (d0, d1) = if n0 >= n1 {
        (dot(c0, c1) / n0.max(1e-300), -1.0)
    } else {
        (1.0, -dot(c0, c1) / n1.max(1e-300))
    };
    let scale = (d0 * d0 + d1 * d1).sqrt();
    (d0 / scale, d1 / scale)
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..120 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

/// One run of the classical greedy pursuit with unconstrained refits.
#[derive(Debug, Clone, PartialEq)]
pub struct OmpRun {
    /// Column chosen at each step, in order.
    pub selected: Vec<usize>,
    /// Refit iterate after each step (full length).
    pub xs: Vec<Vec<f64>>,
    /// Residual norm after each step.
    pub residual_norms: Vec<f64>,
    /// False when a refit block went singular and the run stopped early.
    pub rank_ok: bool,
}

/// Classical greedy pursuit: pick `argmax |⟨A_j, r⟩|` (lowest index wins
/// ties; columns are used as given, the usual unit-norm convention), refit by
/// plain normal equations, repeat. Kept free of the constrained machinery so
/// it can serve as an independent comparison run.
pub fn plain_omp(
    a: &MeasurementMatrix,
    y: &[f64],
    max_steps: usize,
    residual_tol: f64,
) -> OmpRun {
    let n = a.n_cols();
    let mut selected: Vec<usize> = Vec::new();
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut residual_norms: Vec<f64> = Vec::new();
    let mut resid = y.to_vec();
    let mut rank_ok = true;

    for _ in 0..max_steps {
        if norm2(&resid) <= residual_tol {
            break;
        }
        let mut j_star = 0usize;
        let mut best = f64::NEG_INFINITY;
        for jj in 0..n {
            let c = dot(a.col(jj), &resid).abs();
            if c > best {
                best = c;
                j_star = jj;
            }
        }
        selected.push(j_star);
        let mut cols_set: Vec<usize> = selected.clone();
        cols_set.sort_unstable();
        cols_set.dedup();

        let p = cols_set.len();
        let mut g = vec![vec![0.0; p]; p];
        let mut bb = vec![0.0; p];
        for r in 0..p {
            bb[r] = dot(a.col(cols_set[r]), y);
            for c in r..p {
                let v = dot(a.col(cols_set[r]), a.col(cols_set[c]));
                g[r][c] = v;
                g[c][r] = v;
            }
        }
        let scale = g.iter().map(|row| row[0].abs()).fold(1.0, f64::max);
        let Ok(sol) = gauss_solve(&g, &[bb], &(1e-13 * scale)) else {
            rank_ok = false;
            break;
        };
        let mut x = vec![0.0; n];
        for (k, &jj) in cols_set.iter().enumerate() {
            x[jj] = sol[0][k];
        }
        resid = y.to_vec();
        let ax = a.mul_vec(&x);
        for (r, &v) in resid.iter_mut().zip(ax.iter()) {
            *r -= v;
        }
        residual_norms.push(norm2(&resid));
        xs.push(x);
    }

    OmpRun {
        selected,
        xs,
        residual_norms,
        rank_ok,
    }
}

/// Brute-force box-constrained least squares by enumerating bound patterns.
///
/// Every coordinate is tried at its lower bound, upper bound (when finite),
/// or free; free blocks solve plain normal equations. Patterns whose free
/// solution leaves the box are discarded; the minimum over survivors is the
/// global optimum because the true minimizer's own pattern always survives.
pub fn box_ls_enumerate(
    cols: &[Vec<f64>],
    y: &[f64],
    lower: &[f64],
    upper: &[f64],
) -> Result<(Vec<f64>, f64), LinalgError> {
    let p = cols.len();
    let m = y.len();
    #[derive(Clone, Copy, PartialEq)]
    enum Pat {
        Lo,
        Up,
        Free,
    }
    let options: Vec<Vec<Pat>> = (0..p)
        .map(|i| {
            let mut o = vec![Pat::Free];
            if lower[i].is_finite() {
                o.push(Pat::Lo);
            }
            if upper[i].is_finite() && upper[i] != lower[i] {
                o.push(Pat::Up);
            }
            o
        })
        .collect();

    let mut best: Option<(Vec<f64>, f64)> = None;
    for combo in options.into_iter().multi_cartesian_product() {
        let free: Vec<usize> = (0..p).filter(|&i| combo[i] == Pat::Free).collect();
        let mut x = vec![0.0; p];
        for i in 0..p {
            match combo[i] {
                Pat::Lo => x[i] = lower[i],
                Pat::Up => x[i] = upper[i],
                Pat::Free => {}
            }
        }
        if !free.is_empty() {
            let mut rhs = y.to_vec();
            for i in 0..p {
                if combo[i] != Pat::Free && x[i] != 0.0 {
                    for (r, &cv) in rhs.iter_mut().zip(cols[i].iter()) {
                        *r -= x[i] * cv;
                    }
                }
            }
            let q = free.len();
            let mut g = vec![vec![0.0; q]; q];
            let mut bb = vec![0.0; q];
            for r in 0..q {
                bb[r] = dot(&cols[free[r]], &rhs);
                for c in r..q {
                    let v = dot(&cols[free[r]], &cols[free[c]]);
                    g[r][c] = v;
                    g[c][r] = v;
                }
            }
            let scale = (0..q).map(|i| g[i][i]).fold(1.0, f64::max);
            let Ok(sol) = gauss_solve(&g, &[bb], &(1e-13 * scale)) else {
                continue;
            };
            let mut ok = true;
            for (k, &i) in free.iter().enumerate() {
                let v = sol[0][k];
                if v < lower[i] - 1e-9 || v > upper[i] + 1e-9 {
                    ok = false;
                    break;
                }
                x[i] = v.clamp(lower[i], upper[i]);
            }
            if !ok {
                continue;
            }
        }
        let mut obj = 0.0;
        for r in 0..m {
            let mut v = -y[r];
            for c in 0..p {
                v += cols[c][r] * x[c];
            }
            obj += v * v;
        }
        if best.as_ref().map_or(true, |(_, b)| obj < *b) {
            best = Some((x, obj));
        }
    }
    best.ok_or(LinalgError::SingularBlock)
}

/// One failing target found by [`grid_recovery_sim`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFailure {
    pub target: Vec<f64>,
    /// `true` when the support was still recovered and only the final
    /// refit missed the target vector.
    pub vector_only: bool,
}

/// Outcome of a grid-search recovery simulation on a fixed support.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSim {
    pub total_targets: usize,
    /// Targets actually run; the scan stops at the first failure.
    pub checked: usize,
    pub failure: Option<GridFailure>,
}

impl GridSim {
    /// Every target was scanned and every one recovered exactly.
    pub fn all_recovered(&self) -> bool {
        self.failure.is_none() && self.checked == self.total_targets
    }
}

/// Brute-force recovery check over every full-support grid target on
/// `support` (see [`crate::fixtures::grid_targets`]): each target is
/// planted, pursued through every tie branch, and compared against the
/// recovery definitions. Stops at the first failing target.
pub fn grid_recovery_sim(
    a: &MeasurementMatrix,
    model: &ConstraintModel,
    class: &crate::constraint::ConeClassification,
    support: &[usize],
    points: usize,
    max_branches: usize,
    policy: &NumericPolicy,
) -> Result<GridSim, crate::pursuit::PursuitError> {
    let targets = crate::fixtures::grid_targets(class, support, points, 0.1, 2.0);
    let total_targets = targets.len();
    let mut checked = 0;
    for z in targets {
        let check = crate::pursuit::verify_exact_recovery(a, &z, model, max_branches, policy)?;
        checked += 1;
        if !check.support_recovered || !check.vector_recovered {
            return Ok(GridSim {
                total_targets,
                checked,
                failure: Some(GridFailure {
                    target: z,
                    vector_only: check.support_recovered,
                }),
            });
        }
    }
    Ok(GridSim {
        total_targets,
        checked,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pol() -> NumericPolicy {
        NumericPolicy::strict()
    }

    fn mat(cols: Vec<Vec<f64>>) -> MeasurementMatrix {
        MeasurementMatrix::from_columns(cols).unwrap()
    }

    #[test]
    fn demo_full_support_reports_flat_segment() {
        // One equation, (3/4)x₁ + x₂ = 3/2: the zero-residual piece inside
        // the demo set runs from (2/3, 1) on the top edge to the curve
        // crossing at x₂ = (√22 − 2)/3.
        let a = mat(vec![vec![0.75], vec![1.0]]);
        let sol = nonconvex_line7_solve(&a, &[1.5], &[0, 1], &pol()).unwrap();
        assert!(sol.objective < 1e-12);
        let (p, q) = sol.segment.as_ref().expect("flat optimum is a segment");
        assert!((p[0] - 2.0 / 3.0).abs() < 5e-7, "p = {p:?}");
        assert!((p[1] - 1.0).abs() < 5e-7);
        let q2 = (22.0f64.sqrt() - 2.0) / 3.0;
        assert!((q[1] - q2).abs() < 5e-7, "q = {q:?}");
        assert!((q[0] - q2 * q2).abs() < 5e-7);
        // Representative is the endpoint with the smaller first coordinate.
        assert_eq!(sol.x, p.clone());
    }

    #[test]
    fn demo_interior_point_optimum() {
        // Full-rank 2×2 identity: the unconstrained optimum lies inside the
        // curved region and is returned as a point.
        let a = mat(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let sol = nonconvex_line7_solve(&a, &[0.09, 0.4], &[0, 1], &pol()).unwrap();
        assert!(sol.objective < 1e-14);
        assert!((sol.x[0] - 0.09).abs() < 1e-9);
        assert!((sol.x[1] - 0.4).abs() < 1e-9);
        assert!(sol.segment.is_none());
    }

    #[test]
    fn demo_boundary_optimum_beats_dense_grid() {
        let a = mat(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let y = vec![1.0, 0.5];
        let sol = nonconvex_line7_solve(&a, &y, &[0, 1], &pol()).unwrap();
        let model = ConstraintModel::NonconvexDemo;
        assert!(model.contains(&sol.x, &pol()));
        let mut grid_best = f64::INFINITY;
        let steps = 500;
        for i in 0..=steps {
            for k in 0..=steps {
                let x1 = i as f64 / steps as f64;
                let x2 = k as f64 / steps as f64;
                if model.contains(&[x1, x2], &pol()) {
                    let v = (x1 - 1.0) * (x1 - 1.0) + (x2 - 0.5) * (x2 - 0.5);
                    grid_best = grid_best.min(v);
                }
            }
        }
        assert!(sol.objective <= grid_best + 1e-6);
    }

    #[test]
    fn l0_brute_finds_minimum_support() {
        let a = mat(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let free = ConstraintModel::free(3);
        let sol = l0_brute(&a, &[1.0, 0.0, 2.0], &free, 3, DEFAULT_L0_BUDGET, &pol()).unwrap();
        assert_eq!(sol.cardinality, 2);
        assert_eq!(sol.supports, vec![vec![0, 2]]);
        assert!((sol.representatives[0][0] - 1.0).abs() < 1e-10);
        assert!((sol.representatives[0][2] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn l0_brute_reports_unreachable_observation() {
        let a = mat(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let nn = ConstraintModel::nonneg(3);
        let err = l0_brute(&a, &[-1.0, 0.0, 2.0], &nn, 3, DEFAULT_L0_BUDGET, &pol());
        assert_eq!(err, Err(OracleError::NoSolutionWithinKmax { k_max: 3 }));
    }

    #[test]
    fn l0_brute_respects_budget() {
        let cols: Vec<Vec<f64>> = (0..8)
            .map(|j| (0..5).map(|i| ((i * 8 + j) as f64 * 0.37).sin() + 0.1).collect())
            .collect();
        let a = mat(cols);
        let free = ConstraintModel::free(8);
        // A generic 5-dimensional target is unreachable by three columns, so
        // the search runs through levels 0..3 (1+8+28+56 = 93 subsets) and
        // the budget of 100 dies on level 4 (+70).
        let y = vec![1.0, 1.0, 1.0, -2.0, 0.5];
        match l0_brute(&a, &y, &free, 8, 100, &pol()) {
            Err(OracleError::BudgetExceeded { budget: 100, .. }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn plain_omp_on_orthogonal_columns() {
        let a = mat(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let run = plain_omp(&a, &[3.0, -1.0, 2.0], 3, 1e-12);
        assert_eq!(run.selected, vec![0, 2, 1]);
        assert!(run.rank_ok);
        assert!(run.residual_norms[2] < 1e-12);
        assert_eq!(run.xs[2], vec![3.0, -1.0, 2.0]);
    }

    #[test]
    fn grid_sim_separates_clean_and_poisoned_instances() {
        use crate::constraint::ConeClassification;
        use crate::policy::NumericPolicy;

        let policy = NumericPolicy::strict();
        let class = ConeClassification::all_free(3);
        let model = ConstraintModel::free(3);

        // Orthonormal columns recover every target.
        let eye = mat(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let sim = grid_recovery_sim(&eye, &model, &class, &[0, 1], 4, 64, &policy).unwrap();
        assert_eq!(sim.total_targets, 16);
        assert!(sim.all_recovered());

        // A bisector column strictly dominates equal-sign pairs, so some
        // grid target must break.
        let s = 0.5f64.sqrt();
        let poisoned = mat(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![s, s],
        ]);
        let sim =
            grid_recovery_sim(&poisoned, &model, &class, &[0, 1], 4, 64, &policy).unwrap();
        assert!(sim.failure.is_some());
        let failure = sim.failure.unwrap();
        assert!(!failure.vector_only);
        assert!(failure.target[0] != 0.0 && failure.target[1] != 0.0);
    }

    #[test]
    fn box_enumeration_matches_clamp_on_identity() {
        let cols = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let (x, obj) = box_ls_enumerate(
            &cols,
            &[3.0, -2.0, 0.7],
            &[-1.0, -0.5, 0.0],
            &[1.0, 0.25, 2.0],
        )
        .unwrap();
        assert_eq!(x, vec![1.0, -0.5, 0.7]);
        let expect = (3.0f64 - 1.0).powi(2) + (2.0f64 - 0.5).powi(2);
        assert!((obj - expect).abs() < 1e-12);
    }
}
