//! Strict score-dominance decisions over sign orthants.
//!
//! The shared shape of every fixed-support recovery condition is: for all
//! `v` in an open region (each coordinate either strictly positive or
//! sign-free but nonzero), the best score among a set of protected rows
//! strictly exceeds the best score among a set of competitor rows, where a
//! row scores `|rᵀv|`, `(rᵀv)₊`, or `(rᵀv)₋` depending on the coordinate
//! kind it certifies. This module decides that statement exactly.
//!
//! Method: enumerate sign patterns of the sign-free coordinates. Within one
//! orthant, dominance fails at some `v` iff either (a) some competitor row
//! `q` and branch sign `τ` satisfy the linear system `{v in open orthant,
//! τqᵀv > 0, τqᵀv ≥ every linear branch of every protected row}`, or (b)
//! every protected score vanishes somewhere in the orthant (a tie at zero,
//! since competitor scores are nonnegative). Each system is homogeneous, so
//! its solvability is decided through a transposition-theorem alternative:
//! a feasible alternative certifies the system empty, and an empty
//! alternative yields an explicit violating `v` by re-solving the primal
//! with unit normalization. Both routes are exact in rational arithmetic.
//!
//! Failures come in two strengths and the engine reports the stronger one
//! when both exist: a strict violation (the competitor wins outright at
//! some point, margin strictly negative there) or a bare tie (the scores
//! can only meet, margin exactly zero). The distinction matters because a
//! float-mode caller cannot conclude anything from a zero margin, while a
//! strictly negative one is decisive. When the weak system is feasible, a
//! second all-strict system decides whether an interior (strictly
//! winning) point exists; only if no orthant has one does the engine
//! return the first tie point found.

use num_traits::ToPrimitive;

use super::{CertifyError, ConditionReport, Margin, Verdict, Witness};
use crate::linalg::Field;
use crate::lp::{motzkin_alternative_blocks, solve_ge_with_unit_lower_bound, AlternativeOutcome};
use crate::policy::NumericPolicy;

/// How a row turns the linear value `rᵀv` into a score.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    /// `|rᵀv|`: certifies a sign-free coordinate.
    Abs,
    /// `max(rᵀv, 0)`: certifies a nonnegative coordinate.
    Plus,
    /// `max(−rᵀv, 0)`: certifies a nonpositive coordinate.
    Minus,
}

impl RowKind {
    /// Branch signs achieving the score: `τ·rᵀv`.
    fn branches(self) -> &'static [i8] {
        match self {
            RowKind::Abs => &[1, -1],
            RowKind::Plus => &[1],
            RowKind::Minus => &[-1],
        }
    }
}

/// A dominance statement: `max over p_rows > max over q_rows` for all `v`
/// with coordinates in `sign_free` nonzero and all others strictly
/// positive.
#[derive(Clone, Debug)]
pub struct ScoreSystem<T> {
    pub dim: usize,
    pub p_rows: Vec<(Vec<T>, RowKind)>,
    pub q_rows: Vec<(Vec<T>, RowKind)>,
    pub sign_free: Vec<usize>,
}

/// Engine result, in the system's own arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub enum DominanceOutcome<T> {
    Holds,
    /// Explicit point where the competitor side ties or wins. `margin` is
    /// `max_p(v) − max_q(v) ≤ 0`; `sigma` is the full coordinate sign
    /// pattern of the orthant; `target` is the winning competitor row.
    Fails {
        v: Vec<T>,
        sigma: Vec<i8>,
        target: usize,
        margin: T,
    },
    /// A float-mode alternative landed in the ambiguity band.
    Ambiguous { detail: String },
}

fn dot_t<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Score of one row at `v`.
pub fn row_score<T: Field>(row: &[T], kind: RowKind, v: &[T]) -> T {
    let d = dot_t(row, v);
    match kind {
        RowKind::Abs => d.abs(),
        RowKind::Plus => {
            if d > T::zero() {
                d
            } else {
                T::zero()
            }
        }
        RowKind::Minus => {
            let nd = -d;
            if nd > T::zero() {
                nd
            } else {
                T::zero()
            }
        }
    }
}

fn max_score<T: Field>(rows: &[(Vec<T>, RowKind)], v: &[T]) -> T {
    let mut best = T::zero();
    let mut first = true;
    for (row, kind) in rows {
        let s = row_score(row, *kind, v);
        if first || s > best {
            best = s;
            first = false;
        }
    }
    best
}

fn scaled_row<T: Field>(row: &[T], tau: i8) -> Vec<T> {
    row.iter()
        .map(|x| if tau < 0 { -x.clone() } else { x.clone() })
        .collect()
}

fn sub_rows<T: Field>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

/// All linear branch rows of the protected side: the failure system needs
/// `τqᵀv ≥ (each branch)ᵀv` for every branch of every protected row.
fn p_branch_rows<T: Field>(p_rows: &[(Vec<T>, RowKind)]) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for (row, kind) in p_rows {
        for &tau in kind.branches() {
            out.push(scaled_row(row, tau));
        }
    }
    out
}

/// Recovers an explicit point of the homogeneous system `{D_s v ≥ 1,
/// unit_rows·v ≥ 1, ge_rows·v ≥ 0}` in the original coordinates,
/// exploiting that any open solution scales to meet the unit bounds.
fn recover_point<T: Field>(
    s: &[i8],
    unit_rows: &[Vec<T>],
    ge_rows: &[Vec<T>],
    eps_lo: &T,
    eps_hi: &T,
) -> Result<Option<Vec<T>>, CertifyError> {
    let dim = s.len();
    let flip = |row: &[T]| -> Vec<T> {
        row.iter()
            .enumerate()
            .map(|(k, x)| if s[k] < 0 { -x.clone() } else { x.clone() })
            .collect()
    };
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for q in unit_rows {
        rows.push(flip(q));
        rhs.push(T::one());
    }
    for g in ge_rows {
        rows.push(flip(g));
        rhs.push(T::zero());
    }
    let sol = solve_ge_with_unit_lower_bound(&rows, &rhs, eps_lo, eps_hi)?;
    Ok(sol.map(|vt| {
        (0..dim)
            .map(|k| {
                if s[k] < 0 {
                    -vt[k].clone()
                } else {
                    vt[k].clone()
                }
            })
            .collect()
    }))
}

/// Decides the dominance statement. `eps_lo`/`eps_hi` bracket the
/// linear-program ambiguity band; pass zeros for exact arithmetic, where
/// `Ambiguous` cannot occur.
pub fn decide<T: Field>(
    sys: &ScoreSystem<T>,
    eps_lo: &T,
    eps_hi: &T,
) -> Result<DominanceOutcome<T>, CertifyError> {
    let dim = sys.dim;
    if dim == 0 {
        return Err(CertifyError::BadInput("zero-dimensional region".into()));
    }
    if sys
        .p_rows
        .iter()
        .chain(sys.q_rows.iter())
        .any(|(r, _)| r.len() != dim)
    {
        return Err(CertifyError::BadInput("row length != dim".into()));
    }
    if sys.p_rows.is_empty() {
        return Err(CertifyError::BadInput("no protected rows".into()));
    }
    let mut sign_free = sys.sign_free.clone();
    sign_free.sort_unstable();
    sign_free.dedup();
    if sign_free.iter().any(|&k| k >= dim) {
        return Err(CertifyError::BadInput("sign_free index out of range".into()));
    }
    if sign_free.len() > 20 {
        return Err(CertifyError::BudgetExceeded {
            needed: 1u128 << sign_free.len(),
            budget: 1 << 20,
        });
    }
    if sys.q_rows.is_empty() {
        // No competitors: the protected side wins by convention.
        return Ok(DominanceOutcome::Holds);
    }

    let branch_rows = p_branch_rows(&sys.p_rows);
    let mut tie_failure: Option<DominanceOutcome<T>> = None;
    for mask in 0u32..(1u32 << sign_free.len()) {
        let mut s = vec![1i8; dim];
        for (b, &k) in sign_free.iter().enumerate() {
            if mask & (1 << b) != 0 {
                s[k] = -1;
            }
        }
        // Orthant rows s_k e_k in the strict block.
        let orthant: Vec<Vec<T>> = (0..dim)
            .map(|k| {
                let mut e = vec![T::zero(); dim];
                e[k] = if s[k] < 0 { -T::one() } else { T::one() };
                e
            })
            .collect();

        // (a) Some competitor branch catches the protected maximum. The
        // weak system (catch by ≥) proves failure; the all-strict variant
        // then decides whether the competitor can win outright, which
        // pins the margin strictly negative at the recovered point.
        for (j, (q, kind)) in sys.q_rows.iter().enumerate() {
            for &tau in kind.branches() {
                let tq = scaled_row(q, tau);
                let mut strict = orthant.clone();
                strict.push(tq.clone());
                let ge: Vec<Vec<T>> =
                    branch_rows.iter().map(|b| sub_rows(&tq, b)).collect();
                match motzkin_alternative_blocks(&strict, &ge, eps_lo, eps_hi)? {
                    AlternativeOutcome::Witness(_) => continue,
                    AlternativeOutcome::NoWitness { .. } => {}
                    AlternativeOutcome::Ambiguous => {
                        return Ok(DominanceOutcome::Ambiguous {
                            detail: format!(
                                "failure system for competitor row {j}, branch {tau}, \
                                 orthant {s:?} is ambiguous"
                            ),
                        });
                    }
                }
                // Failure is certain; look for a strictly winning point
                // first. An ambiguous or disagreeing strict probe falls
                // back to the tie point, which is always recoverable.
                let mut all_strict = strict.clone();
                all_strict.extend(ge.iter().cloned());
                let strict_point =
                    match motzkin_alternative_blocks(&all_strict, &[], eps_lo, eps_hi)? {
                        AlternativeOutcome::NoWitness { .. } => {
                            let mut unit = vec![tq.clone()];
                            unit.extend(ge.iter().cloned());
                            recover_point(&s, &unit, &[], eps_lo, eps_hi)?
                        }
                        _ => None,
                    };
                if let Some(v) = strict_point {
                    let margin = max_score(&sys.p_rows, &v) - max_score(&sys.q_rows, &v);
                    return Ok(DominanceOutcome::Fails {
                        v,
                        sigma: s,
                        target: j,
                        margin,
                    });
                }
                if tie_failure.is_none() {
                    let v = recover_point(&s, &[tq.clone()], &ge, eps_lo, eps_hi)?
                        .ok_or_else(|| {
                            CertifyError::NumericallyAmbiguous(format!(
                                "failure system (row {j}): alternative and primal disagree"
                            ))
                        })?;
                    let margin = max_score(&sys.p_rows, &v) - max_score(&sys.q_rows, &v);
                    tie_failure = Some(DominanceOutcome::Fails {
                        v,
                        sigma: s.clone(),
                        target: j,
                        margin,
                    });
                }
            }
        }

        // (b) Tie at zero: every protected branch is ≤ 0 somewhere in the
        // orthant, which already defeats strict dominance since competitor
        // scores are nonnegative. Whenever a competitor could also win
        // outright at such a point, route (a) has already found a strict
        // point, so anything new here is a genuine tie.
        if tie_failure.is_none() {
            let neg_branches: Vec<Vec<T>> = branch_rows
                .iter()
                .map(|r| r.iter().map(|x| -x.clone()).collect())
                .collect();
            match motzkin_alternative_blocks(&orthant, &neg_branches, eps_lo, eps_hi)? {
                AlternativeOutcome::Witness(_) => {}
                AlternativeOutcome::NoWitness { .. } => {
                    let v = recover_point(&s, &[], &neg_branches, eps_lo, eps_hi)?
                        .ok_or_else(|| {
                            CertifyError::NumericallyAmbiguous(
                                "zero-tie system: alternative and primal disagree".into(),
                            )
                        })?;
                    let margin = max_score(&sys.p_rows, &v) - max_score(&sys.q_rows, &v);
                    // Blame the best competitor at the recovered point.
                    let target = sys
                        .q_rows
                        .iter()
                        .enumerate()
                        .max_by(|(_, (ra, ka)), (_, (rb, kb))| {
                            row_score(ra, *ka, &v)
                                .partial_cmp(&row_score(rb, *kb, &v))
                                .unwrap_or(std::cmp::Ordering::Equal)
                        })
                        .map(|(j, _)| j)
                        .unwrap_or(0);
                    tie_failure = Some(DominanceOutcome::Fails {
                        v,
                        sigma: s,
                        target,
                        margin,
                    });
                }
                AlternativeOutcome::Ambiguous => {
                    return Ok(DominanceOutcome::Ambiguous {
                        detail: format!("zero-tie system ambiguous in orthant {s:?}"),
                    });
                }
            }
        }
    }
    Ok(tie_failure.unwrap_or(DominanceOutcome::Holds))
}

/// Minimum of `max_p(v) − max_q(v)` over a deterministic grid of the
/// region: each positive coordinate ranges over `pts` points of `[lo, hi]`,
/// each sign-free coordinate additionally over the mirrored negatives.
/// Returns the argmin point and value.
pub fn grid_min_margin(
    sys: &ScoreSystem<f64>,
    pts: usize,
    lo: f64,
    hi: f64,
) -> Result<(Vec<f64>, f64), CertifyError> {
    if sys.dim == 0 || pts == 0 || !(lo > 0.0) || hi < lo {
        return Err(CertifyError::BadInput("bad grid parameters".into()));
    }
    let positives: Vec<f64> = if pts == 1 {
        vec![lo]
    } else {
        (0..pts)
            .map(|k| lo + (hi - lo) * k as f64 / (pts - 1) as f64)
            .collect()
    };
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(sys.dim);
    for k in 0..sys.dim {
        if sys.sign_free.contains(&k) {
            let mut vals: Vec<f64> = positives.iter().map(|&x| -x).collect();
            vals.extend(positives.iter().copied());
            values.push(vals);
        } else {
            values.push(positives.clone());
        }
    }
    let total: u128 = values.iter().map(|v| v.len() as u128).product();
    if total > 20_000_000 {
        return Err(CertifyError::BudgetExceeded {
            needed: total,
            budget: 20_000_000,
        });
    }

    let mut idx = vec![0usize; sys.dim];
    let mut best_v = Vec::new();
    let mut best = f64::INFINITY;
    loop {
        let v: Vec<f64> = idx.iter().enumerate().map(|(k, &i)| values[k][i]).collect();
        let m = max_score(&sys.p_rows, &v) - max_score(&sys.q_rows, &v);
        if m < best {
            best = m;
            best_v = v;
        }
        // Odometer increment.
        let mut k = 0;
        loop {
            if k == sys.dim {
                return Ok((best_v, best));
            }
            idx[k] += 1;
            if idx[k] < values[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Float-mode dominance check packaged as a [`ConditionReport`] with id
/// `score-dominance`. On a violation the witness point and its margin are
/// attached; on success a deterministic sampled lower estimate of the
/// margin is attached when the dimension makes that affordable.
pub fn motzkin_dominance(
    p_rows: Vec<(Vec<f64>, RowKind)>,
    q_rows: Vec<(Vec<f64>, RowKind)>,
    sign_free: Vec<usize>,
    policy: &NumericPolicy,
) -> Result<ConditionReport, CertifyError> {
    let dim = p_rows
        .first()
        .map(|(r, _)| r.len())
        .ok_or_else(|| CertifyError::BadInput("no protected rows".into()))?;
    let sys = ScoreSystem {
        dim,
        p_rows,
        q_rows,
        sign_free,
    };
    let mut report = ConditionReport::new("score-dominance", Verdict::Holds);
    match decide(&sys, &policy.ambiguity_lo, &policy.ambiguity_hi)? {
        DominanceOutcome::Holds => {
            if dim <= 6 {
                let (_, floor) = grid_min_margin(&sys, 7, 0.25, 4.0)?;
                report.numeric_margins.insert(
                    "sampled-floor".into(),
                    Margin::from_value(floor, policy.boundary_tol),
                );
            }
        }
        DominanceOutcome::Fails {
            v,
            sigma,
            target,
            margin,
        } => {
            report.verdict = Verdict::Fails;
            report.witness = Some(Witness::Dominance {
                v: v.clone(),
                sigma,
                target,
                subset: None,
            });
            report.numeric_margins.insert(
                "violation".into(),
                Margin::from_value(margin, policy.boundary_tol),
            );
        }
        DominanceOutcome::Ambiguous { detail } => {
            return Err(CertifyError::NumericallyAmbiguous(detail));
        }
    }
    Ok(report)
}

/// Converts an exact margin to `f64` for reporting. Falls back to the sign
/// when the ratio overflows a double.
pub fn margin_to_f64<T: Field + ToPrimitive>(m: &T) -> f64 {
    m.to_f64().unwrap_or_else(|| {
        if *m > T::zero() {
            f64::INFINITY
        } else if *m < T::zero() {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::MarginState;
    use num_rational::BigRational;
    use num_traits::Zero;

    const LO: f64 = 1e-11;
    const HI: f64 = 1e-9;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn equal_rows_tie_is_a_failure_with_unit_witness() {
        // One protected and one competitor row both equal to (1, 0): the
        // scores tie everywhere, so strict dominance fails; the recovered
        // point normalizes to v = (1, 1).
        let policy = NumericPolicy::strict();
        let rep = motzkin_dominance(
            vec![(vec![1.0, 0.0], RowKind::Abs)],
            vec![(vec![1.0, 0.0], RowKind::Abs)],
            vec![],
            &policy,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        match rep.witness {
            Some(Witness::Dominance { ref v, .. }) => {
                assert!((v[0] - 1.0).abs() <= 1e-9 && (v[1] - 1.0).abs() <= 1e-9);
            }
            ref other => panic!("expected dominance witness, got {other:?}"),
        }
        let m = rep.numeric_margins["violation"];
        assert_eq!(m.state, MarginState::Boundary);
        assert!(m.value.abs() <= 1e-12);
    }

    #[test]
    fn strict_dominance_holds_with_positive_floor() {
        // max(2|v₁|, 2|v₂|) > |v₁/2 + v₂/2| on every nonzero orthant.
        let policy = NumericPolicy::strict();
        let rep = motzkin_dominance(
            vec![
                (vec![2.0, 0.0], RowKind::Abs),
                (vec![0.0, 2.0], RowKind::Abs),
            ],
            vec![(vec![0.5, 0.5], RowKind::Abs)],
            vec![0, 1],
            &policy,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(rep.numeric_margins["sampled-floor"].value > 0.0);
    }

    #[test]
    fn plus_kind_is_one_sided() {
        // Protected (v₁)₊ against competitor (−v₁)₊ on v > 0: holds.
        let sys = ScoreSystem {
            dim: 2,
            p_rows: vec![(vec![1.0, 0.0], RowKind::Plus)],
            q_rows: vec![(vec![-1.0, 0.0], RowKind::Plus)],
            sign_free: vec![],
        };
        assert_eq!(decide(&sys, &LO, &HI).unwrap(), DominanceOutcome::Holds);

        // Same rows with v₁ sign-free: in the negative orthant the
        // protected score vanishes while the competitor's is positive.
        let sys = ScoreSystem {
            sign_free: vec![0],
            ..sys
        };
        match decide(&sys, &LO, &HI).unwrap() {
            DominanceOutcome::Fails { v, margin, .. } => {
                assert!(v[0] < 0.0);
                assert!(margin < 0.0);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn minus_kind_mirrors_plus() {
        // (−v₁)₋ = (v₁)₊ on v > 0 beats (v₁)₋ = 0.
        let sys = ScoreSystem {
            dim: 1,
            p_rows: vec![(vec![-1.0], RowKind::Minus)],
            q_rows: vec![(vec![1.0], RowKind::Minus)],
            sign_free: vec![],
        };
        assert_eq!(decide(&sys, &LO, &HI).unwrap(), DominanceOutcome::Holds);
    }

    #[test]
    fn zero_tie_system_catches_vanishing_protected_scores() {
        // Protected (v₂ − v₁)₊ vanishes on v₁ ≥ v₂ > 0; the competitor is
        // identically zero yet dominance still fails by the tie at zero.
        let sys = ScoreSystem {
            dim: 2,
            p_rows: vec![(vec![-1.0, 1.0], RowKind::Plus)],
            q_rows: vec![(vec![0.0, 0.0], RowKind::Plus)],
            sign_free: vec![],
        };
        match decide(&sys, &LO, &HI).unwrap() {
            DominanceOutcome::Fails { v, margin, .. } => {
                assert!(v[0] >= v[1] - 1e-9);
                assert!(margin.abs() <= 1e-9);
            }
            other => panic!("expected zero-tie failure, got {other:?}"),
        }
    }

    #[test]
    fn exact_mode_detects_exact_boundary() {
        // Rational one-dimensional tie: margin exactly zero.
        let sys = ScoreSystem {
            dim: 1,
            p_rows: vec![(vec![rat(1, 1)], RowKind::Abs)],
            q_rows: vec![(vec![rat(1, 1)], RowKind::Abs)],
            sign_free: vec![0],
        };
        match decide(&sys, &BigRational::zero(), &BigRational::zero()).unwrap() {
            DominanceOutcome::Fails { margin, .. } => {
                assert!(margin.is_zero(), "tie margin must be exactly zero");
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn no_competitors_is_a_trivial_hold() {
        let sys = ScoreSystem {
            dim: 2,
            p_rows: vec![(vec![1.0, 0.0], RowKind::Abs)],
            q_rows: vec![],
            sign_free: vec![],
        };
        assert_eq!(decide(&sys, &LO, &HI).unwrap(), DominanceOutcome::Holds);
    }

    #[test]
    fn grid_and_engine_agree_on_small_systems() {
        // Deterministic family of 2-dimensional systems sweeping a
        // competitor row through and past the protected envelope.
        for k in 0..=20 {
            let c = 0.1 * k as f64;
            let sys = ScoreSystem {
                dim: 2,
                p_rows: vec![
                    (vec![1.0, -0.3], RowKind::Abs),
                    (vec![-0.3, 1.0], RowKind::Abs),
                ],
                q_rows: vec![(vec![c, 0.2], RowKind::Abs)],
                sign_free: vec![0, 1],
            };
            let verdict = decide(&sys, &LO, &HI).unwrap();
            let (_, grid_min) = grid_min_margin(&sys, 40, 0.05, 5.0).unwrap();
            match verdict {
                DominanceOutcome::Holds => {
                    assert!(
                        grid_min > -1e-9,
                        "engine holds but grid found margin {grid_min} at c={c}"
                    );
                }
                DominanceOutcome::Fails { margin, .. } => {
                    assert!(margin <= 1e-9);
                    // The grid may miss a thin failure wedge, but when it
                    // sees one the engine must have too.
                }
                DominanceOutcome::Ambiguous { detail } => {
                    panic!("unexpected ambiguity at c={c}: {detail}")
                }
            }
            if grid_min < -1e-6 {
                assert!(
                    matches!(verdict, DominanceOutcome::Fails { .. }),
                    "grid found margin {grid_min} at c={c} but engine held"
                );
            }
        }
    }
}
