//! Fixed-support recovery certification.
//!
//! Given a unit-column matrix (through its Gram matrix), a support `S`, and
//! a coordinate-product cone, this module evaluates the decidable
//! conditions for exact recovery of every vector supported exactly on `S`,
//! dispatching on the constraint family and support size:
//!
//! * sign-free coordinates, `|S| ≤ 2`: injectivity plus face-enumerated
//!   selection dominance, together necessary and sufficient;
//! * sign-free, `|S| = 3`: the same conditions are sufficient, and strict
//!   or interior violations are still conclusive failures, but a tie on a
//!   proper face decides nothing (the packaged fixture lives exactly
//!   there), so such runs aggregate to `UndecidedSampled`;
//! * sign-free, `|S| ≥ 4`: the restricted-gain bound decides the aggregate
//!   (its strict failure yields a constructive dual witness); the
//!   dominance condition itself is only falsified by sampling;
//! * nonnegative coordinates, `|S| = 2, 3`: selection dominance over the
//!   open positive orthant, Schur-complement subset dominance, and the
//!   closed-form gap/determinant conditions, necessary and sufficient;
//! * nonnegative, other sizes: subset dominance over every proper subset,
//!   sufficient (the empty subset remains necessary);
//! * mixed free/nonnegative: the pair case with one free and one
//!   nonnegative support coordinate is necessary and sufficient; the
//!   general case enumerates subset systems and is sufficient.
//!
//! Nonpositive coordinates are handled by sign conjugation of the Gram
//! matrix, and witnesses are mapped back to original coordinates. Every
//! inequality is computed generically, so the float entry point and the
//! exact rational entry point share one code path.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dominance::{decide, margin_to_f64, DominanceOutcome, RowKind, ScoreSystem};
use super::{CertifyError, ConditionReport, Margin, MarginState, Verdict, Witness};
use crate::constraint::{ConeClassification, ConeKind, ConstraintModel};
use crate::linalg::{gauss_solve, gram, Field, MeasurementMatrix};
use crate::policy::NumericPolicy;

/// Hard cap on the support size for the subset-enumerating cases.
pub const SUBSET_BUDGET: usize = 12;

/// Aggregated certification result for one (matrix, support, cone) triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedSupportReport {
    pub case_id: String,
    /// Whether the dispatched condition set characterizes recovery exactly
    /// (as opposed to being sufficient only).
    pub necessary_and_sufficient: bool,
    pub conditions: Vec<ConditionReport>,
    pub aggregate: Verdict,
}

/// Arithmetic-mode parameters shared by both entry points.
struct Mode<T> {
    eps_lo: T,
    eps_hi: T,
    pivot_eps: T,
    /// Boundary band half-width for margin classification (`0.0` in exact
    /// mode, where only an exact zero is a boundary).
    band: f64,
}

impl Mode<f64> {
    fn float(policy: &NumericPolicy) -> Self {
        Mode {
            eps_lo: policy.ambiguity_lo,
            eps_hi: policy.ambiguity_hi,
            pivot_eps: 1e-12,
            band: policy.boundary_tol,
        }
    }
}

impl Mode<BigRational> {
    fn exact() -> Self {
        Mode {
            eps_lo: BigRational::zero(),
            eps_hi: BigRational::zero(),
            pivot_eps: BigRational::zero(),
            band: 0.0,
        }
    }
}

impl<T> Mode<T> {
    /// Exact arithmetic collapses the boundary band to a point, so a zero
    /// band identifies the mode.
    fn is_exact(&self) -> bool {
        self.band == 0.0
    }
}

impl<T: Field + ToPrimitive> Mode<T> {
    /// Mode-faithful margin classification. In exact mode the state comes
    /// from the sign of the rational itself, so it stays correct even when
    /// the reported `f64` value underflows; in float mode the boundary band
    /// absorbs computation error.
    fn margin(&self, m: &T) -> Margin {
        let value = margin_to_f64(m);
        if self.is_exact() {
            let state = if m.is_zero() {
                MarginState::Boundary
            } else if *m > T::zero() {
                MarginState::Holds
            } else {
                MarginState::Fails
            };
            Margin { value, state }
        } else {
            Margin::from_value(value, self.band)
        }
    }
}

/// Verdict of a single strict-inequality condition from its margin state.
/// An exact tie falsifies a strict inequality; a float boundary only says
/// the computation cannot tell.
fn verdict_for(state: MarginState, exact: bool) -> Verdict {
    match state {
        MarginState::Holds => Verdict::Holds,
        MarginState::Fails => Verdict::Fails,
        MarginState::Boundary => {
            if exact {
                Verdict::Fails
            } else {
                Verdict::UndecidedSampled
            }
        }
    }
}

/// Aggregate accumulator. A failing margin is conclusive (`fatal`) when
/// the failure direction is backed by a necessity argument; boundary ties
/// are conclusive only in exact arithmetic, and only where an exact tie is
/// itself fatal (branching on a tied score provably breaks recovery).
#[derive(Default)]
struct Agg {
    fatal: bool,
    undecided: bool,
}

impl Agg {
    fn add_failure(
        &mut self,
        state: MarginState,
        exact: bool,
        strict_is_fatal: bool,
        tie_is_fatal: bool,
    ) {
        match state {
            MarginState::Fails => {
                if strict_is_fatal {
                    self.fatal = true;
                } else {
                    self.undecided = true;
                }
            }
            MarginState::Boundary if exact && tie_is_fatal => {
                self.fatal = true;
            }
            _ => {
                self.undecided = true;
            }
        }
    }

    fn verdict(&self) -> Verdict {
        if self.fatal {
            Verdict::Fails
        } else if self.undecided {
            Verdict::UndecidedSampled
        } else {
            Verdict::Holds
        }
    }
}

/// Conjugated problem data: after sign-flipping the nonpositive
/// coordinates, every column is either sign-free or nonnegative.
struct Ctx<'m, T> {
    gram: Vec<Vec<T>>,
    s: Vec<usize>,
    sc: Vec<usize>,
    kinds: Vec<ConeKind>,
    flip: Vec<i8>,
    mode: &'m Mode<T>,
}

impl<T: Field> Ctx<'_, T> {
    fn theta(&self, i: usize, j: usize) -> T {
        self.gram[i][j].clone()
    }

    fn kind_row(&self, col: usize) -> RowKind {
        match self.kinds[col] {
            ConeKind::Free => RowKind::Abs,
            _ => RowKind::Plus,
        }
    }

    /// Original-sign view of a witness vector indexed by `cols`.
    fn unflip(&self, cols: &[usize], v: &[T]) -> Vec<f64>
    where
        T: ToPrimitive,
    {
        cols.iter()
            .zip(v)
            .map(|(&c, x)| f64::from(self.flip[c]) * margin_to_f64(x))
            .collect()
    }

    fn unflip_sigma(&self, cols: &[usize], sigma: &[i8]) -> Vec<i8> {
        cols.iter().zip(sigma).map(|(&c, &s)| self.flip[c] * s).collect()
    }
}

fn set_label(cols: &[usize]) -> String {
    let inner = cols
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!("{{{inner}}}")
}

/// Leading principal minors of a symmetric block via unpivoted
/// elimination. A zero pivot means that leading minor is exactly zero; the
/// remaining entries are then padded with zeros, which is enough for the
/// positive-definiteness verdict even though the padded values are not the
/// true minors.
fn leading_minors<T: Field>(block: &[Vec<T>]) -> Vec<T> {
    let k = block.len();
    let mut a = block.to_vec();
    let mut minors = Vec::with_capacity(k);
    let mut acc = T::one();
    for i in 0..k {
        let piv = a[i][i].clone();
        if piv.is_zero() {
            minors.resize(k, T::zero());
            return minors;
        }
        acc = acc * piv.clone();
        minors.push(acc.clone());
        for r in (i + 1)..k {
            let f = a[r][i].clone() / piv.clone();
            for c in i..k {
                let sub = f.clone() * a[i][c].clone();
                a[r][c] = a[r][c].clone() - sub;
            }
        }
    }
    minors
}

/// Positive definiteness of the support block, reported as the minimum
/// leading principal minor. On failure the witness is a direction `v` with
/// `vᵀ Θ_SS v ≤ 0`, built from the first non-positive pivot.
fn injectivity_condition<T: Field + ToPrimitive>(
    ctx: &Ctx<'_, T>,
) -> Result<(ConditionReport, bool), CertifyError> {
    let block: Vec<Vec<T>> = ctx
        .s
        .iter()
        .map(|&i| ctx.s.iter().map(|&j| ctx.theta(i, j)).collect())
        .collect();
    let minors = leading_minors(&block);
    let (worst_idx, worst) = minors
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, m)| (i, m.clone()))
        .expect("support is nonempty");
    let m = ctx.mode.margin(&worst);
    let state = m.state;
    let mut rep = ConditionReport::new("injectivity", verdict_for(state, ctx.mode.is_exact()))
        .with_margin("min-leading-minor", m);
    let pd = state == MarginState::Holds;
    if !pd {
        // First index whose minor is ≤ 0 (or inside the band).
        let k = minors
            .iter()
            .position(|m| ctx.mode.margin(m).state != MarginState::Holds)
            .unwrap_or(worst_idx);
        let mut v = vec![T::zero(); ctx.s.len()];
        if k == 0 {
            v[0] = T::one();
        } else {
            let head: Vec<Vec<T>> = (0..k)
                .map(|r| (0..k).map(|c| block[r][c].clone()).collect())
                .collect();
            let rhs: Vec<T> = (0..k).map(|r| block[r][k].clone()).collect();
            let x = gauss_solve(&head, &[rhs], &ctx.mode.pivot_eps)?;
            for (r, xv) in x[0].iter().enumerate() {
                v[r] = xv.clone();
            }
            v[k] = -T::one();
        }
        rep.witness = Some(Witness::Vector(ctx.unflip(&ctx.s, &v)));
    }
    Ok((rep, pd))
}

/// Restricted-gain condition for sign-free constraints: the max column
/// 1-norm of `(Θ_SS)⁻¹ Θ_{S,S^c}` must be below one. Returns the report,
/// the margin, and per-column solve vectors for witness construction.
fn restricted_gain_condition<T: Field + ToPrimitive>(
    ctx: &Ctx<'_, T>,
) -> Result<(ConditionReport, T, Vec<Vec<T>>), CertifyError> {
    let block: Vec<Vec<T>> = ctx
        .s
        .iter()
        .map(|&i| ctx.s.iter().map(|&j| ctx.theta(i, j)).collect())
        .collect();
    let b_cols: Vec<Vec<T>> = ctx
        .sc
        .iter()
        .map(|&j| ctx.s.iter().map(|&i| ctx.theta(i, j)).collect())
        .collect();
    let xs = if b_cols.is_empty() {
        Vec::new()
    } else {
        gauss_solve(&block, &b_cols, &ctx.mode.pivot_eps)?
    };
    let mut worst = T::zero();
    let mut worst_col = None;
    for (jj, x) in xs.iter().enumerate() {
        let sum = x.iter().fold(T::zero(), |acc, v| acc + v.abs());
        if worst_col.is_none() || sum > worst {
            worst = sum;
            worst_col = Some(ctx.sc[jj]);
        }
    }
    let margin = T::one() - worst.clone();
    let m = ctx.mode.margin(&margin);
    let state = m.state;
    let mut rep = ConditionReport::new("restricted-gain", verdict_for(state, ctx.mode.is_exact()))
        .with_margin("one-minus-gain", m);
    if state != MarginState::Holds {
        if let Some(j) = worst_col {
            rep.witness = Some(Witness::Index(j));
        }
    }
    Ok((rep, margin, xs))
}

/// One dominance failure, tagged by which member of the family broke.
struct DomFailure {
    state: MarginState,
    is_empty_subset_or_full_face: bool,
}

/// Runs the engine on a list of systems, assembling one report. `systems`
/// pairs each score system with the original column indices of its
/// coordinates and a flag marking the necessary member of the family (the
/// full face, or the empty subset).
#[allow(clippy::type_complexity)]
fn dominance_family_condition<T: Field + ToPrimitive + Send + Sync>(
    ctx: &Ctx<'_, T>,
    id: &str,
    key_prefix: &str,
    systems: Vec<(ScoreSystem<T>, Vec<usize>, bool)>,
    parallel: bool,
) -> Result<(ConditionReport, Vec<DomFailure>), CertifyError> {
    let run = |(sys, cols, necessary): &(ScoreSystem<T>, Vec<usize>, bool)| {
        decide(sys, &ctx.mode.eps_lo, &ctx.mode.eps_hi)
            .map(|out| (out, cols.clone(), *necessary))
    };
    let outcomes: Vec<(DominanceOutcome<T>, Vec<usize>, bool)> = if parallel {
        systems
            .par_iter()
            .map(run)
            .collect::<Result<Vec<_>, CertifyError>>()?
    } else {
        systems
            .iter()
            .map(run)
            .collect::<Result<Vec<_>, CertifyError>>()?
    };

    let mut rep = ConditionReport::new(id, Verdict::Holds);
    let mut failures = Vec::new();
    for (out, cols, necessary) in outcomes {
        match out {
            DominanceOutcome::Holds => {}
            DominanceOutcome::Fails {
                v,
                sigma,
                target,
                margin,
            } => {
                // A strictly negative margin certifies a violation; a
                // boundary margin certifies a tie, which falsifies the
                // strict condition only in exact arithmetic.
                let m = ctx.mode.margin(&margin);
                let state = m.state;
                let v_fail = verdict_for(state, ctx.mode.is_exact());
                if v_fail == Verdict::Fails
                    || (v_fail == Verdict::UndecidedSampled && rep.verdict == Verdict::Holds)
                {
                    rep.verdict = v_fail;
                }
                rep.numeric_margins
                    .insert(format!("{key_prefix}={}", set_label(&cols)), m);
                if rep.witness.is_none() {
                    rep.witness = Some(Witness::Dominance {
                        v: ctx.unflip(&cols, &v),
                        sigma: ctx.unflip_sigma(&cols, &sigma),
                        target: ctx.sc.get(target).copied().unwrap_or(target),
                        subset: Some(cols.clone()),
                    });
                }
                failures.push(DomFailure {
                    state,
                    is_empty_subset_or_full_face: necessary,
                });
            }
            DominanceOutcome::Ambiguous { detail } => {
                return Err(CertifyError::NumericallyAmbiguous(detail));
            }
        }
    }
    Ok((rep, failures))
}

/// Face system for sign-free constraints: protected rows are every support
/// row of the Gram matrix restricted to the face coordinates, competitors
/// every off-support row, all scored in absolute value over sign-free
/// nonzero face coordinates.
fn face_system<T: Field>(ctx: &Ctx<'_, T>, face: &[usize]) -> ScoreSystem<T> {
    let dim = face.len();
    let p_rows = ctx
        .s
        .iter()
        .map(|&i| {
            (
                face.iter().map(|&c| ctx.theta(i, c)).collect(),
                RowKind::Abs,
            )
        })
        .collect();
    let q_rows = ctx
        .sc
        .iter()
        .map(|&j| {
            (
                face.iter().map(|&c| ctx.theta(j, c)).collect(),
                RowKind::Abs,
            )
        })
        .collect();
    ScoreSystem {
        dim,
        p_rows,
        q_rows,
        sign_free: (0..dim).collect(),
    }
}

/// Subset system: for a subset `J ⊂ S` (given as original column ids), the
/// protected rows are the Schur-complement rows of the support block over
/// `K = S \ J` and the competitor rows are the off-support rows deflated by
/// the same elimination; row kinds follow the owning column's cone kind,
/// and sign-free coordinates of `K` keep both signs.
fn subset_system<T: Field>(
    ctx: &Ctx<'_, T>,
    j_cols: &[usize],
) -> Result<(ScoreSystem<T>, Vec<usize>), CertifyError> {
    let k_cols: Vec<usize> = ctx
        .s
        .iter()
        .copied()
        .filter(|c| !j_cols.contains(c))
        .collect();
    let dim = k_cols.len();
    // X = (Θ_JJ)⁻¹ Θ_{J,K}.
    let xs: Vec<Vec<T>> = if j_cols.is_empty() {
        Vec::new()
    } else {
        let a_jj: Vec<Vec<T>> = j_cols
            .iter()
            .map(|&r| j_cols.iter().map(|&c| ctx.theta(r, c)).collect())
            .collect();
        let b_cols: Vec<Vec<T>> = k_cols
            .iter()
            .map(|&c| j_cols.iter().map(|&r| ctx.theta(r, c)).collect())
            .collect();
        gauss_solve(&a_jj, &b_cols, &ctx.mode.pivot_eps).map_err(|_| {
            CertifyError::RankDeficient(format!(
                "subset block J={} is singular",
                set_label(j_cols)
            ))
        })?
    };
    let deflated_row = |owner: usize| -> Vec<T> {
        (0..dim)
            .map(|i| {
                let mut v = ctx.theta(owner, k_cols[i]);
                for (t, &jc) in j_cols.iter().enumerate() {
                    v = v - ctx.theta(owner, jc) * xs[i][t].clone();
                }
                v
            })
            .collect()
    };
    let p_rows: Vec<(Vec<T>, RowKind)> = k_cols
        .iter()
        .map(|&k| (deflated_row(k), ctx.kind_row(k)))
        .collect();
    let q_rows: Vec<(Vec<T>, RowKind)> = ctx
        .sc
        .iter()
        .map(|&j| (deflated_row(j), ctx.kind_row(j)))
        .collect();
    let sign_free: Vec<usize> = (0..dim)
        .filter(|&i| ctx.kinds[k_cols[i]] == ConeKind::Free)
        .collect();
    Ok((
        ScoreSystem {
            dim,
            p_rows,
            q_rows,
            sign_free,
        },
        k_cols,
    ))
}

/// Closed-form gap condition for support pairs. `role1`/`role2` are the
/// support columns in theorem order; `abs_first` selects the mixed-pair
/// variant (first coordinate sign-free).
fn pair_gap_condition<T: Field + ToPrimitive>(
    ctx: &Ctx<'_, T>,
    role1: usize,
    role2: usize,
    mixed: bool,
) -> ConditionReport {
    let t12 = ctx.theta(role1, role2);
    let lhs = T::one() - t12.clone() * t12.clone();
    let mut rhs = T::zero();
    let mut offender = None;
    let consider = |cand: T, j: usize, current: &mut T, off: &mut Option<usize>| {
        if cand > *current {
            *current = cand;
            *off = Some(j);
        }
    };
    for &j in &ctx.sc {
        let d2 = ctx.theta(j, role2) - t12.clone() * ctx.theta(j, role1);
        let d1 = ctx.theta(j, role1) - t12.clone() * ctx.theta(j, role2);
        if mixed {
            // Competitors certifying the sign-free coordinate count in
            // absolute value regardless of their own kind.
            consider(d1.abs(), j, &mut rhs, &mut offender);
            match ctx.kind_row(j) {
                RowKind::Abs => consider(d2.abs(), j, &mut rhs, &mut offender),
                _ => consider(
                    if d2 > T::zero() { d2 } else { T::zero() },
                    j,
                    &mut rhs,
                    &mut offender,
                ),
            }
        } else {
            let d2p = if d2 > T::zero() { d2 } else { T::zero() };
            let d1p = if d1 > T::zero() { d1 } else { T::zero() };
            consider(d2p, j, &mut rhs, &mut offender);
            consider(d1p, j, &mut rhs, &mut offender);
        }
    }
    let margin = lhs - rhs;
    let m = ctx.mode.margin(&margin);
    let state = m.state;
    let mut rep = ConditionReport::new("gram-gap", verdict_for(state, ctx.mode.is_exact()))
        .with_margin("gap", m);
    if state != MarginState::Holds {
        rep.witness = offender.map(Witness::Index);
    }
    rep
}

/// Determinant-implication condition for nonnegative support triples: for
/// each support pair, if its gap exceeds the smaller cross-correction, the
/// support-block determinant must dominate the worst competitor combination.
fn det_implications_condition<T: Field + ToPrimitive>(ctx: &Ctx<'_, T>) -> ConditionReport {
    let s = &ctx.s;
    let t = |a: usize, b: usize| ctx.theta(s[a], s[b]);
    let delta = |a: usize, b: usize, c: usize| t(a, b) - t(a, c) * t(c, b);
    let det_m = T::one() + (T::one() + T::one()) * t(0, 1) * t(0, 2) * t(1, 2)
        - t(0, 1) * t(0, 1)
        - t(0, 2) * t(0, 2)
        - t(1, 2) * t(1, 2);

    let mut rep = ConditionReport::new("determinant-implications", Verdict::Holds);
    // (pair, spare) runs over {(0,1;2), (0,2;1), (1,2;0)}.
    for &(a, b, c) in &[(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)] {
        let d_ac = delta(a, c, b);
        let d_bc = delta(b, c, a);
        let min_d = if d_ac < d_bc { d_ac.clone() } else { d_bc.clone() };
        let hyp = (T::one() - t(a, b) * t(a, b)) - min_d;
        let mut worst = T::zero();
        let mut offender = None;
        for &j in &ctx.sc {
            let cand = ctx.theta(j, s[c]) * (T::one() - t(a, b) * t(a, b))
                - ctx.theta(j, s[a]) * d_ac.clone()
                - ctx.theta(j, s[b]) * d_bc.clone();
            let cand = if cand > T::zero() { cand } else { T::zero() };
            if cand > worst {
                worst = cand;
                offender = Some(j);
            }
        }
        let concl = det_m.clone() - worst;
        let label = format!("{}{}", s[a], s[b]);
        let hyp_m = ctx.mode.margin(&hyp);
        let concl_m = ctx.mode.margin(&concl);
        rep.numeric_margins.insert(format!("hyp-{label}"), hyp_m.clone());
        rep.numeric_margins
            .insert(format!("concl-{label}"), concl_m.clone());
        // The implication is certainly false when the hypothesis certainly
        // holds and the (strict) conclusion certainly does not; with a
        // float boundary on either side the computation cannot tell. An
        // exactly-zero hypothesis margin leaves the implication vacuous.
        let exact = ctx.mode.is_exact();
        let active = hyp_m.state == MarginState::Holds;
        let possibly_active = active || (!exact && hyp_m.state == MarginState::Boundary);
        let concl_violated = concl_m.state == MarginState::Fails
            || (exact && concl_m.state == MarginState::Boundary);
        let concl_possibly_violated =
            concl_violated || (!exact && concl_m.state == MarginState::Boundary);
        if active && concl_violated {
            rep.verdict = Verdict::Fails;
            if rep.witness.is_none() {
                rep.witness = offender.map(Witness::Index);
            }
        } else if possibly_active
            && concl_possibly_violated
            && rep.verdict == Verdict::Holds
        {
            rep.verdict = Verdict::UndecidedSampled;
        }
    }
    rep
}

/// Sampled falsification of selection dominance for large sign-free
/// supports. A strict gain excess yields a deterministic dual witness;
/// otherwise random face points are tried. Absence of a witness decides
/// nothing.
fn sampled_faces_condition<T: Field + ToPrimitive>(
    ctx: &Ctx<'_, T>,
    gain_margin: &T,
    gain_solves: &[Vec<T>],
) -> Result<ConditionReport, CertifyError> {
    use rand::Rng;
    use rand::SeedableRng;

    let mut rep = ConditionReport::new("selection-dominance-sampled", Verdict::UndecidedSampled);
    let s_len = ctx.s.len();

    // Constructive route: gain above one gives z with Θ_SS z = sign
    // pattern, where the worst competitor's response equals the gain > 1
    // while every protected response is ±1.
    if ctx.mode.margin(gain_margin).state == MarginState::Fails {
        let (jj, _) = gain_solves
            .iter()
            .enumerate()
            .map(|(jj, x)| (jj, x.iter().fold(T::zero(), |a, v| a + v.abs())))
            .max_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
            .expect("competitors exist when the gain fails");
        let signs: Vec<T> = gain_solves[jj]
            .iter()
            .map(|v| {
                if *v >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                }
            })
            .collect();
        let block: Vec<Vec<T>> = ctx
            .s
            .iter()
            .map(|&i| ctx.s.iter().map(|&j| ctx.theta(i, j)).collect())
            .collect();
        let z = gauss_solve(&block, &[signs], &ctx.mode.pivot_eps)?.remove(0);
        // Max protected response is 1 by construction; the worst
        // competitor's response equals the gain.
        rep.verdict = Verdict::Fails;
        rep.witness = Some(Witness::Vector(ctx.unflip(&ctx.s, &z)));
        rep.numeric_margins.insert(
            format!("face={}", set_label(&ctx.s)),
            ctx.mode.margin(gain_margin),
        );
        return Ok(rep);
    }

    // Sampled route, run on a float shadow of the Gram matrix (sampling in
    // exact arithmetic would only re-derive float points at great cost; a
    // float hit below the band is still a trustworthy strict violation of
    // the original problem up to re-verification by the caller). The band
    // is floored at the float boundary width even in exact mode, since the
    // sampled margins themselves are float.
    let fband = ctx.mode.band.max(1e-9);
    let gram_f: Vec<Vec<f64>> = ctx
        .gram
        .iter()
        .map(|r| r.iter().map(margin_to_f64).collect())
        .collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED_FACE5);
    let mut min_margin = f64::INFINITY;
    for _ in 0..2000 {
        // Random nonempty face and random signed magnitudes in (0.1, 2].
        let mut face: Vec<usize> = ctx
            .s
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.7))
            .collect();
        if face.is_empty() {
            face.push(ctx.s[rng.gen_range(0..s_len)]);
        }
        let v: Vec<f64> = face
            .iter()
            .map(|_| {
                let mag = 0.1 + 1.9 * rng.gen::<f64>();
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let response = |i: usize| {
            face.iter()
                .zip(&v)
                .map(|(&c, x)| gram_f[i][c] * x)
                .sum::<f64>()
                .abs()
        };
        let p_best = ctx.s.iter().map(|&i| response(i)).fold(f64::NEG_INFINITY, f64::max);
        let (q_target, q_best) = ctx
            .sc
            .iter()
            .map(|&j| (j, response(j)))
            .max_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal))
            .expect("competitors exist");
        let margin = p_best - q_best;
        min_margin = min_margin.min(margin);
        if margin < -fband {
            rep.verdict = Verdict::Fails;
            rep.witness = Some(Witness::Dominance {
                v: face
                    .iter()
                    .zip(&v)
                    .map(|(&c, &x)| f64::from(ctx.flip[c]) * x)
                    .collect(),
                sigma: face
                    .iter()
                    .zip(&v)
                    .map(|(&c, &x)| ctx.flip[c] * if x < 0.0 { -1 } else { 1 })
                    .collect(),
                target: q_target,
                subset: Some(face.clone()),
            });
            rep.numeric_margins.insert(
                format!("face={}", set_label(&face)),
                Margin::from_value(margin, fband),
            );
            return Ok(rep);
        }
    }
    if min_margin.is_finite() {
        rep.numeric_margins.insert(
            "sampled-floor".into(),
            Margin::from_value(min_margin, fband),
        );
    }
    Ok(rep)
}

/// Float entry point: certifies recovery on support `s` for the cone
/// described by `model`, which must be a coordinate-product cone with no
/// `{0}` slice. Columns of `a` must be unit-norm.
pub fn check_fixed_support(
    a: &MeasurementMatrix,
    s: &[usize],
    model: &ConstraintModel,
    policy: &NumericPolicy,
) -> Result<FixedSupportReport, CertifyError> {
    let class = model.classify_cone().map_err(|_| {
        CertifyError::UnsupportedCombination(
            "constraint set is not a coordinate-product cone".into(),
        )
    })?;
    for (j, norm) in a.column_norms().iter().enumerate() {
        if (norm - 1.0).abs() > 1e-8 {
            return Err(CertifyError::BadInput(format!(
                "column {j} has norm {norm}; unit columns required"
            )));
        }
    }
    let g = gram(a);
    let rows: Vec<Vec<f64>> = (0..a.n_cols()).map(|i| g.row(i).to_vec()).collect();
    let mode = Mode::float(policy);
    run_checks(rows, s, &class, &mode)
}

/// Exact entry point: the caller supplies the Gram matrix in rational
/// arithmetic (unit diagonal required) and the cone classification.
pub fn check_fixed_support_exact(
    gram: &[Vec<BigRational>],
    s: &[usize],
    class: &ConeClassification,
) -> Result<FixedSupportReport, CertifyError> {
    let n = gram.len();
    if gram.iter().any(|r| r.len() != n) {
        return Err(CertifyError::BadInput("Gram matrix must be square".into()));
    }
    for i in 0..n {
        if gram[i][i] != BigRational::one() {
            return Err(CertifyError::BadInput(format!(
                "diagonal entry {i} is not one; unit columns required"
            )));
        }
        for j in 0..i {
            if gram[i][j] != gram[j][i] {
                return Err(CertifyError::BadInput("Gram matrix must be symmetric".into()));
            }
        }
    }
    let mode = Mode::exact();
    run_checks(gram.to_vec(), s, class, &mode)
}

fn run_checks<T: Field + ToPrimitive + Send + Sync>(
    gram_rows: Vec<Vec<T>>,
    s: &[usize],
    class: &ConeClassification,
    mode: &Mode<T>,
) -> Result<FixedSupportReport, CertifyError> {
    let n = gram_rows.len();
    if class.n() != n {
        return Err(CertifyError::BadInput(
            "classification length does not match Gram size".into(),
        ));
    }
    let mut s_sorted = s.to_vec();
    s_sorted.sort_unstable();
    s_sorted.dedup();
    if s_sorted.is_empty() {
        return Err(CertifyError::BadInput("empty support".into()));
    }
    if s_sorted.len() != s.len() {
        return Err(CertifyError::BadInput("support has duplicates".into()));
    }
    if *s_sorted.last().unwrap() >= n {
        return Err(CertifyError::BadInput("support index out of range".into()));
    }
    if !class.i0.is_empty() {
        return Err(CertifyError::UnsupportedCombination(
            "constraint set has a {0} coordinate slice".into(),
        ));
    }

    // Conjugate nonpositive coordinates to nonnegative ones.
    let mut flip = vec![1i8; n];
    for &j in &class.iminus {
        flip[j] = -1;
    }
    let mut gram_c = gram_rows;
    for i in 0..n {
        for j in 0..n {
            if flip[i] * flip[j] < 0 {
                gram_c[i][j] = -gram_c[i][j].clone();
            }
        }
    }
    let mut kinds = vec![ConeKind::Plus; n];
    for &j in &class.i1 {
        kinds[j] = ConeKind::Free;
    }
    let sc: Vec<usize> = (0..n).filter(|j| !s_sorted.contains(j)).collect();
    let ctx = Ctx {
        gram: gram_c,
        s: s_sorted,
        sc,
        kinds,
        flip,
        mode,
    };

    let n_free = ctx.kinds.iter().filter(|k| **k == ConeKind::Free).count();
    let s_len = ctx.s.len();
    let family_free = n_free == n;
    let family_plus = n_free == 0;
    let exact = mode.is_exact();

    let (inj_rep, pd) = injectivity_condition(&ctx)?;
    let inj_state = inj_rep.numeric_margins["min-leading-minor"].state;
    let mut agg = Agg::default();
    if !pd {
        // Injectivity is necessary in every case of the table.
        agg.add_failure(inj_state, exact, true, true);
    }
    let mut conditions = vec![inj_rep];
    let case_id;
    let nec_suf;

    if family_free {
        nec_suf = s_len <= 2;
        case_id = match s_len {
            1 => "free-single",
            2 => "free-pair",
            3 => "free-triple",
            _ => "free-large",
        };
        if pd {
            let (gain_rep, gain_margin, solves) = restricted_gain_condition(&ctx)?;
            let gain_state = gain_rep.numeric_margins["one-minus-gain"].state;
            // A strict gain excess implies a constructive interior failure;
            // an exact gain tie (or a float boundary) decides nothing by
            // itself.
            if gain_state != MarginState::Holds {
                agg.add_failure(gain_state, exact, true, false);
            }
            if s_len <= 3 {
                let full_mask = (1u32 << s_len) - 1;
                let systems: Vec<(ScoreSystem<T>, Vec<usize>, bool)> = (1..=full_mask)
                    .map(|mask| {
                        let face: Vec<usize> = (0..s_len)
                            .filter(|b| mask & (1 << b) != 0)
                            .map(|b| ctx.s[b])
                            .collect();
                        (face_system(&ctx, &face), face, mask == full_mask)
                    })
                    .collect();
                let (dom_rep, failures) = dominance_family_condition(
                    &ctx,
                    "selection-dominance",
                    "face",
                    systems,
                    false,
                )?;
                for f in &failures {
                    // Strict face violations extend to interior targets by
                    // continuity; exact ties are fatal on every face when
                    // the condition set is exact (|S| ≤ 2), but only on
                    // the full face for |S| = 3.
                    let tie_fatal = s_len <= 2 || f.is_empty_subset_or_full_face;
                    agg.add_failure(f.state, exact, true, tie_fatal);
                }
                conditions.push(dom_rep);
            } else {
                // The gain bound is equivalent to face dominance here, so
                // a strict gain margin decides the aggregate even though
                // the dominance condition itself is only sampled.
                let sampled = sampled_faces_condition(&ctx, &gain_margin, &solves)?;
                if sampled.verdict == Verdict::Fails {
                    agg.add_failure(MarginState::Fails, exact, true, false);
                }
                conditions.push(sampled);
            }
            conditions.push(gain_rep);
        }
    } else {
        // Subset-enumeration budget applies to every non-free family.
        if s_len > SUBSET_BUDGET {
            return Err(CertifyError::BudgetExceeded {
                needed: 1u128 << s_len,
                budget: 1u128 << SUBSET_BUDGET,
            });
        }
        let s_free: Vec<usize> = ctx
            .s
            .iter()
            .copied()
            .filter(|&c| ctx.kinds[c] == ConeKind::Free)
            .collect();
        let mixed_pair = !family_plus && s_len == 2 && s_free.len() == 1;
        nec_suf = if family_plus {
            s_len <= 3
        } else {
            s_len == 1 || mixed_pair
        };
        case_id = if family_plus {
            match s_len {
                1 => "nonneg-single",
                2 => "nonneg-pair",
                3 => "nonneg-triple",
                _ => "nonneg-general",
            }
        } else if s_len == 1 {
            "mixed-single"
        } else if mixed_pair {
            "mixed-pair"
        } else {
            "mixed-general"
        };
        // For the characterized cases every condition is necessary, so
        // strict failures and exact ties are conclusive everywhere; for
        // the sufficient-only cases conclusiveness is confined to the
        // greedy first-step (empty-subset) system.
        let all_necessary = nec_suf;

        if pd {
            let masks: Vec<u32> = if family_plus && s_len == 2 {
                vec![0]
            } else if family_plus && s_len == 3 {
                vec![0, 1, 2, 4]
            } else if mixed_pair {
                vec![0]
            } else {
                (0..(1u32 << s_len) - 1).collect()
            };
            let systems: Vec<(ScoreSystem<T>, Vec<usize>, bool)> = masks
                .iter()
                .map(|&mask| {
                    let j_cols: Vec<usize> = (0..s_len)
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| ctx.s[b])
                        .collect();
                    let (sys, k_cols) = subset_system(&ctx, &j_cols)?;
                    Ok((sys, k_cols, mask == 0))
                })
                .collect::<Result<Vec<_>, CertifyError>>()?;
            // The greedy first-step (empty-subset) system gets its own
            // report; an exact tie there always breaks some branch of the
            // pursuit, so it is conclusive in every family.
            let (head, tail): (Vec<_>, Vec<_>) =
                systems.into_iter().partition(|(_, _, nec)| *nec);
            let (sel_rep, sel_fail) =
                dominance_family_condition(&ctx, "selection-dominance", "J", head, false)?;
            for f in &sel_fail {
                agg.add_failure(f.state, exact, true, true);
            }
            conditions.push(sel_rep);
            if !tail.is_empty() {
                let parallel = tail.len() > 8;
                let (sub_rep, sub_fail) = dominance_family_condition(
                    &ctx,
                    "subset-schur-dominance",
                    "J",
                    tail,
                    parallel,
                )?;
                for f in &sub_fail {
                    // In the characterized cases a nonempty-subset failure
                    // is conclusive like any other; in the sufficient-only
                    // cases it proves nothing, because the pursuit may
                    // never visit that subset.
                    agg.add_failure(f.state, exact, all_necessary, all_necessary);
                }
                conditions.push(sub_rep);
            }
            match case_id {
                "nonneg-pair" => {
                    let rep = pair_gap_condition(&ctx, ctx.s[0], ctx.s[1], false);
                    if rep.verdict != Verdict::Holds {
                        agg.add_failure(rep.numeric_margins["gap"].state, exact, true, true);
                    }
                    conditions.push(rep);
                }
                "mixed-pair" => {
                    let (r1, r2) = if ctx.kinds[ctx.s[0]] == ConeKind::Free {
                        (ctx.s[0], ctx.s[1])
                    } else {
                        (ctx.s[1], ctx.s[0])
                    };
                    let rep = pair_gap_condition(&ctx, r1, r2, true);
                    if rep.verdict != Verdict::Holds {
                        agg.add_failure(rep.numeric_margins["gap"].state, exact, true, true);
                    }
                    conditions.push(rep);
                }
                "nonneg-triple" => {
                    let rep = det_implications_condition(&ctx);
                    match rep.verdict {
                        Verdict::Fails => agg.add_failure(MarginState::Fails, exact, true, true),
                        Verdict::UndecidedSampled => agg.undecided = true,
                        Verdict::Holds => {}
                    }
                    conditions.push(rep);
                }
                _ => {}
            }
        }
    }

    Ok(FixedSupportReport {
        case_id: case_id.into(),
        necessary_and_sufficient: nec_suf,
        conditions,
        aggregate: agg.verdict(),
    })
}

/// Shared worker for the exact-recovery-coefficient norm: the max column
/// 1-norm of `(Θ_SS)⁻¹ Θ_{S,S^c}` over the given Gram rows. When `S` covers
/// every column the off-support block is empty and the norm is zero.
fn erc_norm_of_gram<T: Field>(
    gram_rows: &[Vec<T>],
    s: &[usize],
    pivot_eps: &T,
) -> Result<T, CertifyError> {
    let n = gram_rows.len();
    let mut s_sorted = s.to_vec();
    s_sorted.sort_unstable();
    s_sorted.dedup();
    if s_sorted.is_empty() {
        return Err(CertifyError::BadInput("empty support".into()));
    }
    if s_sorted.len() != s.len() {
        return Err(CertifyError::BadInput("support has duplicates".into()));
    }
    if *s_sorted.last().unwrap() >= n {
        return Err(CertifyError::BadInput("support index out of range".into()));
    }
    let sc: Vec<usize> = (0..n).filter(|j| !s_sorted.contains(j)).collect();
    let block: Vec<Vec<T>> = s_sorted
        .iter()
        .map(|&i| s_sorted.iter().map(|&j| gram_rows[i][j].clone()).collect())
        .collect();
    let b_cols: Vec<Vec<T>> = sc
        .iter()
        .map(|&j| s_sorted.iter().map(|&i| gram_rows[i][j].clone()).collect())
        .collect();
    let xs = if b_cols.is_empty() {
        Vec::new()
    } else {
        gauss_solve(&block, &b_cols, pivot_eps).map_err(|_| {
            CertifyError::RankDeficient(format!(
                "support block S={} is singular",
                set_label(&s_sorted)
            ))
        })?
    };
    let mut worst = T::zero();
    for x in &xs {
        let sum = x.iter().fold(T::zero(), |acc, v| acc + v.abs());
        if sum > worst {
            worst = sum;
        }
    }
    Ok(worst)
}

/// Exact-recovery-coefficient norm of `a` on support `s` in float
/// arithmetic: `max_{j ∉ S} ‖(A_SᵀA_S)⁻¹ A_Sᵀ a_j‖₁`. Columns must be
/// unit-norm so the Gram matrix has a unit diagonal; values below one mean
/// every off-support column is strictly dominated in the sign-free setting.
pub fn erc_norm(a: &MeasurementMatrix, s: &[usize]) -> Result<f64, CertifyError> {
    for (j, norm) in a.column_norms().iter().enumerate() {
        if (norm - 1.0).abs() > 1e-8 {
            return Err(CertifyError::BadInput(format!(
                "column {j} has norm {norm}; unit columns required"
            )));
        }
    }
    let g = gram(a);
    let rows: Vec<Vec<f64>> = (0..a.n_cols()).map(|i| g.row(i).to_vec()).collect();
    erc_norm_of_gram(&rows, s, &1e-12)
}

/// Exact-recovery-coefficient norm from a rational Gram matrix (square,
/// symmetric, unit diagonal), computed without rounding.
pub fn erc_norm_exact(
    gram: &[Vec<BigRational>],
    s: &[usize],
) -> Result<BigRational, CertifyError> {
    let n = gram.len();
    if gram.iter().any(|r| r.len() != n) {
        return Err(CertifyError::BadInput("Gram matrix must be square".into()));
    }
    for i in 0..n {
        if gram[i][i] != BigRational::one() {
            return Err(CertifyError::BadInput(format!(
                "diagonal entry {i} is not one; unit columns required"
            )));
        }
        for j in 0..i {
            if gram[i][j] != gram[j][i] {
                return Err(CertifyError::BadInput("Gram matrix must be symmetric".into()));
            }
        }
    }
    erc_norm_of_gram(gram, s, &BigRational::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::dominance::grid_min_margin;
    use crate::fixtures;
    use crate::linalg::normalize_columns;
    use rand::{Rng, SeedableRng};

    fn identity_matrix(n: usize) -> MeasurementMatrix {
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        MeasurementMatrix::from_columns(cols).unwrap()
    }

    fn report_condition<'r>(rep: &'r FixedSupportReport, id: &str) -> &'r ConditionReport {
        rep.conditions
            .iter()
            .find(|c| c.condition_id == id)
            .unwrap_or_else(|| panic!("missing condition {id}"))
    }

    #[test]
    fn orthonormal_free_pair_holds() {
        let a = identity_matrix(4);
        let rep = check_fixed_support(
            &a,
            &[0, 1],
            &ConstraintModel::free(4),
            &NumericPolicy::strict(),
        )
        .unwrap();
        assert_eq!(rep.case_id, "free-pair");
        assert!(rep.necessary_and_sufficient);
        assert_eq!(rep.aggregate, Verdict::Holds);
        assert_eq!(report_condition(&rep, "injectivity").verdict, Verdict::Holds);
        assert_eq!(
            report_condition(&rep, "restricted-gain").numeric_margins["one-minus-gain"].value,
            1.0
        );
    }

    #[test]
    fn duplicate_column_single_support_is_a_tie() {
        // Two identical columns: selecting between them ties exactly, even
        // for a singleton support. Float arithmetic cannot distinguish an
        // exact tie from a tiny strict gap, so the float verdict is
        // undecided; exact arithmetic resolves it to a failure.
        let cols = vec![vec![1.0, 0.0], vec![1.0, 0.0]];
        let a = MeasurementMatrix::from_columns(cols).unwrap();
        let rep = check_fixed_support(
            &a,
            &[0],
            &ConstraintModel::free(2),
            &NumericPolicy::strict(),
        )
        .unwrap();
        assert_eq!(rep.case_id, "free-single");
        assert_eq!(rep.aggregate, Verdict::UndecidedSampled);
        let dom = report_condition(&rep, "selection-dominance");
        assert_eq!(dom.verdict, Verdict::UndecidedSampled);
        assert!(dom.witness.is_some(), "the tie point should be reported");
        assert!(dom
            .numeric_margins
            .values()
            .all(|m| m.state == MarginState::Boundary));

        let one = BigRational::one;
        let gram = vec![vec![one(), one()], vec![one(), one()]];
        let class = ConeClassification::all_free(2);
        let rep = check_fixed_support_exact(&gram, &[0], &class).unwrap();
        assert_eq!(rep.aggregate, Verdict::Fails);
        let dom = report_condition(&rep, "selection-dominance");
        assert_eq!(dom.verdict, Verdict::Fails);
        assert!(dom.witness.is_some());
    }

    #[test]
    fn fixture_free_triple_is_a_boundary_wall() {
        // The packaged four-column fixture: gain exactly one, selection
        // dominance tied on a proper face. In float arithmetic every
        // margin sits inside the boundary band, so an honest run is either
        // undecided or reports the ambiguity as an error; it must never
        // claim a strict hold or a strict failure.
        let a = fixtures::counterexample_matrix();
        match check_fixed_support(
            &a,
            &[0, 1, 2],
            &ConstraintModel::free(4),
            &NumericPolicy::strict(),
        ) {
            Ok(rep) => {
                assert_eq!(rep.case_id, "free-triple");
                assert!(!rep.necessary_and_sufficient);
                assert_eq!(rep.aggregate, Verdict::UndecidedSampled);

                let gain = report_condition(&rep, "restricted-gain");
                assert_eq!(gain.verdict, Verdict::UndecidedSampled);
                let m = &gain.numeric_margins["one-minus-gain"];
                assert_eq!(m.state, MarginState::Boundary);
                assert!(m.value.abs() <= 1e-12);

                let dom = report_condition(&rep, "selection-dominance");
                assert_ne!(dom.verdict, Verdict::Fails);
                for (key, margin) in &dom.numeric_margins {
                    assert!(margin.value.abs() <= 1e-9, "{key} margin {}", margin.value);
                    assert_ne!(key, "face={0,1,2}", "full face must dominate strictly");
                }
            }
            Err(CertifyError::NumericallyAmbiguous(_)) => {}
            Err(other) => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn fixture_exact_mode_margins_are_exactly_zero() {
        // Exact arithmetic pins the fixture down: the gain margin is
        // exactly zero, the tied faces are proper faces, and the aggregate
        // stays undecided because a proper-face tie breaks nothing that
        // the greedy branching cannot absorb.
        let gram = fixtures::counterexample_gram_exact();
        let class = ConeClassification::all_free(4);
        let rep = check_fixed_support_exact(&gram, &[0, 1, 2], &class).unwrap();
        assert_eq!(rep.aggregate, Verdict::UndecidedSampled);
        let gain = report_condition(&rep, "restricted-gain");
        assert_eq!(gain.numeric_margins["one-minus-gain"].value, 0.0);
        assert_eq!(
            gain.numeric_margins["one-minus-gain"].state,
            MarginState::Boundary
        );
        // Exact ties falsify the strict per-face conditions themselves.
        let dom = report_condition(&rep, "selection-dominance");
        assert_eq!(dom.verdict, Verdict::Fails);
        assert!(!dom.numeric_margins.is_empty());
        assert!(dom
            .numeric_margins
            .values()
            .all(|m| m.value == 0.0 && m.state == MarginState::Boundary));
        assert!(
            !dom.numeric_margins.contains_key("face={0,1,2}"),
            "full-face dominance must hold exactly"
        );
    }

    #[test]
    fn nonneg_pair_realizable_failure_has_reverifiable_witness() {
        // Third column leans into the span of the support with a strongly
        // positive response to the first: the greedy step picks it for
        // flat nonnegative targets.
        let cols = vec![
            vec![1.0, 0.0, 0.0],
            vec![-0.6, 0.8, 0.0],
            vec![0.9, 0.4, 0.03f64.sqrt()],
        ];
        let a = MeasurementMatrix::from_columns(cols).unwrap();
        let rep = check_fixed_support(
            &a,
            &[0, 1],
            &ConstraintModel::nonneg(3),
            &NumericPolicy::strict(),
        )
        .unwrap();
        assert_eq!(rep.case_id, "nonneg-pair");
        assert!(rep.necessary_and_sufficient);
        assert_eq!(rep.aggregate, Verdict::Fails);
        let dom = report_condition(&rep, "selection-dominance");
        assert_eq!(dom.verdict, Verdict::Fails);
        match dom.witness {
            Some(Witness::Dominance { ref v, .. }) => {
                // Re-verify: the competitor response beats both support
                // responses at the witness.
                let g = gram(&a);
                let protected = (g.theta(0, 0) * v[0] + g.theta(0, 1) * v[1])
                    .max(g.theta(1, 0) * v[0] + g.theta(1, 1) * v[1])
                    .max(0.0);
                let competitor = (g.theta(2, 0) * v[0] + g.theta(2, 1) * v[1]).max(0.0);
                assert!(v.iter().all(|&x| x > 0.0));
                assert!(competitor >= protected - 1e-9);
            }
            ref other => panic!("expected dominance witness, got {other:?}"),
        }
    }

    #[test]
    fn nonneg_pair_mild_coherence_holds() {
        let cols = vec![
            vec![1.0, 0.0, 0.0],
            vec![-0.6, 0.8, 0.0],
            vec![0.2, 0.3, 0.9327379053088816],
        ];
        let a = MeasurementMatrix::from_columns(cols).unwrap();
        let (a, _) = normalize_columns(&a).unwrap();
        let rep = check_fixed_support(
            &a,
            &[0, 1],
            &ConstraintModel::nonneg(3),
            &NumericPolicy::strict(),
        )
        .unwrap();
        assert_eq!(rep.aggregate, Verdict::Holds);
        assert!(report_condition(&rep, "gram-gap").numeric_margins["gap"].value > 0.0);
    }

    #[test]
    fn nonneg_triple_subset_systems_match_grid() {
        // Fixture Gram under the nonnegative cone: whatever the verdict,
        // a dense grid over the open positive orthant must agree with the
        // greedy first-step system.
        let a = fixtures::counterexample_matrix();
        let rep = check_fixed_support(
            &a,
            &[0, 1, 2],
            &ConstraintModel::nonneg(4),
            &NumericPolicy::strict(),
        )
        .unwrap();
        assert_eq!(rep.case_id, "nonneg-triple");
        let g = gram(&a);
        let sys = ScoreSystem {
            dim: 3,
            p_rows: (0..3)
                .map(|i| ((0..3).map(|j| g.theta(i, j)).collect(), RowKind::Plus))
                .collect(),
            q_rows: vec![((0..3).map(|j| g.theta(3, j)).collect(), RowKind::Plus)],
            sign_free: vec![],
        };
        let (_, grid_min) = grid_min_margin(&sys, 25, 0.05, 5.0).unwrap();
        let sel = report_condition(&rep, "selection-dominance");
        if sel.verdict == Verdict::Holds {
            assert!(grid_min > -1e-9, "grid found violation {grid_min}");
        } else {
            assert!(grid_min <= 1e-6, "engine failed but grid stayed positive");
        }
    }

    #[test]
    fn mixed_pair_orthogonal_holds_and_roles_are_ordered() {
        let a = identity_matrix(3);
        let model = ConstraintModel::box_product(
            vec![f64::NEG_INFINITY, 0.0, 0.0],
            vec![f64::INFINITY, f64::INFINITY, f64::INFINITY],
        )
        .unwrap();
        let rep =
            check_fixed_support(&a, &[0, 1], &model, &NumericPolicy::strict()).unwrap();
        assert_eq!(rep.case_id, "mixed-pair");
        assert!(rep.necessary_and_sufficient);
        assert_eq!(rep.aggregate, Verdict::Holds);
    }

    #[test]
    fn minus_cone_conjugation_round_trips_witnesses() {
        // Duplicate columns again, but under the nonpositive cone: the
        // reported tie point must come back in original (negative)
        // coordinates.
        let cols = vec![vec![1.0, 0.0], vec![1.0, 0.0]];
        let a = MeasurementMatrix::from_columns(cols).unwrap();
        let model = ConstraintModel::box_product(
            vec![f64::NEG_INFINITY, f64::NEG_INFINITY],
            vec![0.0, 0.0],
        )
        .unwrap();
        let rep =
            check_fixed_support(&a, &[0], &model, &NumericPolicy::strict()).unwrap();
        assert_eq!(rep.case_id, "nonneg-single");
        assert_eq!(rep.aggregate, Verdict::UndecidedSampled);
        match report_condition(&rep, "selection-dominance").witness {
            Some(Witness::Dominance { ref v, .. }) => {
                assert!(v[0] < 0.0, "witness must live in the original cone");
            }
            ref other => panic!("expected dominance witness, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_models_are_rejected() {
        let a = identity_matrix(3);
        let policy = NumericPolicy::strict();
        let simplex = ConstraintModel::weighted_simplex(vec![1.0, 1.0, 1.0], 1.0).unwrap();
        assert!(matches!(
            check_fixed_support(&a, &[0], &simplex, &policy),
            Err(CertifyError::UnsupportedCombination(_))
        ));
        let boxy = ConstraintModel::box_product(vec![-1.0; 3], vec![1.0; 3]).unwrap();
        assert!(matches!(
            check_fixed_support(&a, &[0], &boxy, &policy),
            Err(CertifyError::UnsupportedCombination(_))
        ));
        let zero_slice = ConstraintModel::box_product(
            vec![0.0, f64::NEG_INFINITY, 0.0],
            vec![0.0, f64::INFINITY, f64::INFINITY],
        )
        .unwrap();
        assert!(matches!(
            check_fixed_support(&a, &[1], &zero_slice, &policy),
            Err(CertifyError::UnsupportedCombination(_))
        ));
    }

    #[test]
    fn subset_budget_guard_trips() {
        let a = identity_matrix(14);
        let s: Vec<usize> = (0..13).collect();
        let out = check_fixed_support(
            &a,
            &s,
            &ConstraintModel::nonneg(14),
            &NumericPolicy::strict(),
        );
        assert!(matches!(out, Err(CertifyError::BudgetExceeded { .. })));
    }

    #[test]
    fn nonneg_general_orthonormal_holds() {
        let a = identity_matrix(6);
        let rep = check_fixed_support(
            &a,
            &[0, 1, 2, 3],
            &ConstraintModel::nonneg(6),
            &NumericPolicy::strict(),
        )
        .unwrap();
        assert_eq!(rep.case_id, "nonneg-general");
        assert!(!rep.necessary_and_sufficient);
        assert_eq!(rep.aggregate, Verdict::Holds);
    }

    #[test]
    fn free_large_gain_decides_aggregate() {
        let a = identity_matrix(6);
        let rep = check_fixed_support(
            &a,
            &[0, 1, 2, 3],
            &ConstraintModel::free(6),
            &NumericPolicy::strict(),
        )
        .unwrap();
        assert_eq!(rep.case_id, "free-large");
        assert_eq!(rep.aggregate, Verdict::Holds);
        assert_eq!(
            report_condition(&rep, "selection-dominance-sampled").verdict,
            Verdict::UndecidedSampled
        );

        // A fifth unit column leaning equally on all four support columns:
        // the gain is two and the dual construction yields a witness.
        let cols = vec![
            vec![1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.5, 0.5, 0.5, 0.5, 0.0],
        ];
        let a = MeasurementMatrix::from_columns(cols).unwrap();
        let rep = check_fixed_support(
            &a,
            &[0, 1, 2, 3],
            &ConstraintModel::free(5),
            &NumericPolicy::strict(),
        )
        .unwrap();
        assert_eq!(rep.aggregate, Verdict::Fails);
        let sampled = report_condition(&rep, "selection-dominance-sampled");
        assert_eq!(sampled.verdict, Verdict::Fails);
        match sampled.witness {
            Some(Witness::Vector(ref z)) => {
                // Re-verify the dual construction: the off-support column
                // beats every support response at z.
                let g = gram(&a);
                let resp = |i: usize| (0..4).map(|j| g.theta(i, j) * z[j]).sum::<f64>();
                let p_best = (0..4).map(|i| resp(i).abs()).fold(f64::MIN, f64::max);
                assert!(resp(4).abs() > p_best + 1e-9);
            }
            ref other => panic!("expected vector witness, got {other:?}"),
        }
    }

    #[test]
    fn rank_deficient_support_reports_direction_witness() {
        // Two nearly parallel support columns: the minimum leading minor
        // collapses into the boundary band, which float arithmetic cannot
        // tell apart from exact singularity, so the verdict is undecided
        // and the near-null direction is reported for inspection.
        let cols = vec![
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1e-9, 0.0],
            vec![0.0, 0.0, 1.0],
        ];
        let a = MeasurementMatrix::from_columns(cols).unwrap();
        let (a, _) = normalize_columns(&a).unwrap();
        let rep = check_fixed_support(
            &a,
            &[0, 1],
            &ConstraintModel::free(3),
            &NumericPolicy::strict(),
        )
        .unwrap();
        assert_eq!(rep.aggregate, Verdict::UndecidedSampled);
        assert_eq!(rep.conditions.len(), 1, "downstream checks are skipped");
        let inj = report_condition(&rep, "injectivity");
        assert_eq!(inj.verdict, Verdict::UndecidedSampled);
        assert_eq!(
            inj.numeric_margins["min-leading-minor"].state,
            MarginState::Boundary
        );
        match inj.witness {
            Some(Witness::Vector(ref v)) => {
                let g = gram(&a);
                let q = (0..2)
                    .map(|i| {
                        (0..2)
                            .map(|j| v[i] * g.theta(i, j) * v[j])
                            .sum::<f64>()
                    })
                    .sum::<f64>();
                assert!(q.abs() <= 1e-8, "witness quadratic form {q}");
            }
            ref other => panic!("expected vector witness, got {other:?}"),
        }
    }

    #[test]
    fn exact_indefinite_block_fails_injectivity() {
        // A symmetric unit-diagonal matrix that is not a Gram matrix of
        // unit vectors: the support block is indefinite, so exact mode
        // proves the failure outright.
        let rat = fixtures::rat;
        let g = vec![
            vec![rat(1, 1), rat(2, 1)],
            vec![rat(2, 1), rat(1, 1)],
        ];
        let class = ConeClassification::all_free(2);
        let rep = check_fixed_support_exact(&g, &[0, 1], &class).unwrap();
        assert_eq!(rep.aggregate, Verdict::Fails);
        let inj = report_condition(&rep, "injectivity");
        assert_eq!(inj.verdict, Verdict::Fails);
        assert!(inj.numeric_margins["min-leading-minor"].value < 0.0);
        assert!(inj.witness.is_some());
    }

    #[test]
    fn erc_norm_of_the_fixture_support_is_exactly_one() {
        // The packaged four-column fixture sits exactly on the classical
        // sign-free recovery wall: the coefficient norm over the first
        // three columns is one on the nose.
        let gram = fixtures::counterexample_gram_exact();
        let exact = erc_norm_exact(&gram, &[0, 1, 2]).unwrap();
        assert_eq!(exact, BigRational::one());

        let a = fixtures::counterexample_matrix();
        let float = erc_norm(&a, &[0, 1, 2]).unwrap();
        assert!((float - 1.0).abs() <= 1e-12, "float reading {float}");
    }

    #[test]
    fn erc_norm_handles_edge_supports() {
        // Orthonormal columns never leak onto the complement; a support
        // covering every column has no competitors at all.
        let a = identity_matrix(4);
        assert_eq!(erc_norm(&a, &[1, 3]).unwrap(), 0.0);
        assert_eq!(erc_norm(&a, &[0, 1, 2, 3]).unwrap(), 0.0);
        assert!(matches!(
            erc_norm(&a, &[]),
            Err(CertifyError::BadInput(_))
        ));
        assert!(matches!(
            erc_norm(&a, &[0, 0]),
            Err(CertifyError::BadInput(_))
        ));
        assert!(matches!(
            erc_norm(&a, &[4]),
            Err(CertifyError::BadInput(_))
        ));
    }

    #[test]
    fn erc_norm_exact_rejects_singular_support_blocks() {
        let one = BigRational::one;
        let gram = vec![
            vec![one(), one(), BigRational::zero()],
            vec![one(), one(), BigRational::zero()],
            vec![BigRational::zero(), BigRational::zero(), one()],
        ];
        assert!(matches!(
            erc_norm_exact(&gram, &[0, 1]),
            Err(CertifyError::RankDeficient(_))
        ));
    }

    #[test]
    fn erc_norm_matches_the_gain_condition_reading() {
        // The standalone norm and the fixed-support report must agree:
        // margin key "one-minus-gain" is literally 1 − erc_norm.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(07_441);
        for _ in 0..20 {
            let cols: Vec<Vec<f64>> = (0..6)
                .map(|_| (0..5).map(|_| rng.gen::<f64>() - 0.5).collect())
                .collect();
            let (a, _) =
                normalize_columns(&MeasurementMatrix::from_columns(cols).unwrap()).unwrap();
            let s = &[1, 4];
            let rep = check_fixed_support(
                &a,
                s,
                &ConstraintModel::free(6),
                &NumericPolicy::strict(),
            )
            .unwrap();
            let margin = rep
                .conditions
                .iter()
                .find(|c| c.condition_id == "restricted-gain")
                .unwrap()
                .numeric_margins["one-minus-gain"]
                .value;
            let norm = erc_norm(&a, s).unwrap();
            assert!((margin - (1.0 - norm)).abs() <= 1e-12);
        }
    }
}
