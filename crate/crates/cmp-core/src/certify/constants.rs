//! Sparsity-class constants, the sampled falsifier for the greedy
//! selection inequality, per-instance certificates, and perturbation
//! stability.
//!
//! The class constants bound, over every support of size `K`, how far the
//! support blocks of the Gram matrix sit from the identity (`delta_hat`)
//! and how strongly any single column correlates with `K` others
//! (`theta_hat`). Their gap `(1 - delta_hat) - sqrt(K) * theta_hat`
//! certifies, when strictly positive, that the greedy selection inequality
//! holds for a whole class of instances; the per-instance certificate
//! sharpens the same gap with a shrink factor extracted from how the
//! constraint set clamps each candidate move.
//!
//! Sampling, by contrast, can only falsify: `condition_h_falsify` searches
//! for an admissible target and a partial selection at which the best
//! off-support move strictly beats every remaining on-support move. A
//! negative margin is a hard counterexample (the returned witness replays
//! it); absence of one decides nothing.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fixed_support::SUBSET_BUDGET;
use super::{CertifyError, ConditionReport, Margin, MarginState, Verdict, Witness, BOUNDARY_TOL};
use crate::constraint::{ConeClassification, ConstraintModel};
use crate::linalg::{gram, min_eig_sym, normalize_columns, MeasurementMatrix};
use crate::policy::NumericPolicy;
use crate::pursuit::coordinate_score;
use crate::solver::solve_restricted;

/// Hard cap on the number of supports enumerated for the class constants.
pub const ENUMERATION_BUDGET: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Worst-case distance of the size-`K` support blocks from the identity,
/// reported through the minimizing support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaHat {
    pub k: usize,
    /// `1 - min_eigenvalue`.
    pub value: f64,
    /// Smallest eigenvalue of any `K`-column Gram block.
    pub min_eigenvalue: f64,
    pub argmin_support: Vec<usize>,
}

/// Class constants for sparsity level `K` and their satisfaction margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConstants {
    pub k: usize,
    pub delta_hat: DeltaHat,
    /// Largest 2-norm of `K` off-diagonal entries taken from one Gram
    /// column (the diagonal is never part of the selected block, and
    /// columns frozen at zero by the classification never compete).
    pub theta_hat: f64,
    /// Alternative reading that lets the selected block include the unit
    /// diagonal entry, which forces the value to at least one and makes
    /// the class condition vacuous. Both readings are reported;
    /// `theta_hat` is the one used for the margin.
    pub theta_hat_literal: f64,
    /// Whether the two readings differ for this matrix (they almost always
    /// do; the flag records that the choice mattered).
    pub readings_differ: bool,
    /// Coordinate split used to pick the competing columns.
    pub classification: ConeClassification,
    /// `(1 - delta_hat) - sqrt(K) * theta_hat`.
    pub margin: Margin,
    /// True only when the margin holds strictly beyond the boundary band.
    pub satisfied: bool,
    pub supports_enumerated: u128,
}

fn require_unit_columns(a: &MeasurementMatrix) -> Result<(), CertifyError> {
    for (j, norm) in a.column_norms().iter().enumerate() {
        if (norm - 1.0).abs() > 1e-8 {
            return Err(CertifyError::BadInput(format!(
                "column {j} has norm {norm}; unit columns required"
            )));
        }
    }
    Ok(())
}

/// Computes the class constants for sparsity `k` by exhaustive support
/// enumeration. The classification decides which columns can compete for
/// selection: coordinates frozen at zero are left out of the column range
/// of `theta_hat`. Errors with [`CertifyError::BudgetExceeded`] when the
/// number of supports passes [`ENUMERATION_BUDGET`].
pub fn recovery_constants(
    a: &MeasurementMatrix,
    k: usize,
    classification: &ConeClassification,
    policy: &NumericPolicy,
) -> Result<RecoveryConstants, CertifyError> {
    let n = a.n_cols();
    if k == 0 || k > n {
        return Err(CertifyError::BadInput(format!(
            "sparsity level {k} is outside 1..={n}"
        )));
    }
    if classification.n() != n {
        return Err(CertifyError::BadInput(format!(
            "classification covers {} coordinates but the matrix has {n} columns",
            classification.n()
        )));
    }
    require_unit_columns(a)?;
    let needed = binomial(n, k);
    if needed > ENUMERATION_BUDGET {
        return Err(CertifyError::BudgetExceeded {
            needed,
            budget: ENUMERATION_BUDGET,
        });
    }
    let g = gram(a);

    let mut min_eigenvalue = f64::INFINITY;
    let mut argmin_support = Vec::new();
    for s in (0..n).combinations(k) {
        let block = g.block(&s, &s);
        let e = min_eig_sym(&block, policy);
        if e < min_eigenvalue {
            min_eigenvalue = e;
            argmin_support = s;
        }
    }

    let mut theta_hat: f64 = 0.0;
    let mut theta_hat_literal: f64 = 0.0;
    for j in 0..n {
        if classification.i0.contains(&j) {
            continue;
        }
        let mut off: Vec<f64> = (0..n)
            .filter(|&i| i != j)
            .map(|i| g.theta(i, j) * g.theta(i, j))
            .collect();
        off.sort_by(|p, q| q.partial_cmp(p).unwrap());
        let top: f64 = off.iter().take(k).sum();
        theta_hat = theta_hat.max(top.sqrt());
        let with_diag: f64 = 1.0 + off.iter().take(k - 1).sum::<f64>();
        theta_hat_literal = theta_hat_literal.max(with_diag.sqrt());
    }

    let delta = 1.0 - min_eigenvalue;
    let margin_value = (1.0 - delta) - (k as f64).sqrt() * theta_hat;
    let margin = Margin::from_value(margin_value, BOUNDARY_TOL);
    Ok(RecoveryConstants {
        k,
        delta_hat: DeltaHat {
            k,
            value: delta,
            min_eigenvalue,
            argmin_support,
        },
        theta_hat,
        theta_hat_literal,
        readings_differ: (theta_hat_literal - theta_hat).abs() > 1e-12,
        classification: classification.clone(),
        margin,
        satisfied: margin.state == MarginState::Holds,
        supports_enumerated: needed,
    })
}

/// Validated target/selection pair shared by the instance-level routines.
struct Instance {
    supp: Vec<usize>,
    j: Vec<usize>,
}

/// Shape checks shared by the instance-level routines. Membership of the
/// target in the constraint set is checked separately: the selection
/// margin quantifies over admissible targets, while the per-instance
/// certificate deliberately accepts targets outside the set (the
/// restricted fit below is what gets projected into it).
fn validate_shape(
    a: &MeasurementMatrix,
    model: &ConstraintModel,
    u: &[f64],
    j_set: &[usize],
) -> Result<Instance, CertifyError> {
    let n = a.n_cols();
    if u.len() != n {
        return Err(CertifyError::BadInput(format!(
            "target has length {} but the matrix has {n} columns",
            u.len()
        )));
    }
    if model.n() != n {
        return Err(CertifyError::BadInput(
            "constraint set dimension does not match the matrix".into(),
        ));
    }
    let supp: Vec<usize> = u
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, _)| i)
        .collect();
    if supp.is_empty() {
        return Err(CertifyError::BadInput("target vector is zero".into()));
    }
    let mut j = j_set.to_vec();
    j.sort_unstable();
    j.dedup();
    if j.len() != j_set.len() {
        return Err(CertifyError::BadInput("selected set has duplicates".into()));
    }
    if !j.iter().all(|c| supp.binary_search(c).is_ok()) {
        return Err(CertifyError::BadInput(
            "selected set must lie inside the target support".into(),
        ));
    }
    if j.len() == supp.len() {
        return Err(CertifyError::BadInput(
            "selected set must be a proper subset of the support".into(),
        ));
    }
    Ok(Instance { supp, j })
}

fn validate_instance(
    a: &MeasurementMatrix,
    model: &ConstraintModel,
    u: &[f64],
    j_set: &[usize],
    policy: &NumericPolicy,
) -> Result<Instance, CertifyError> {
    if !model.contains(u, policy) {
        return Err(CertifyError::BadInput(
            "target vector is not a member of the constraint set".into(),
        ));
    }
    validate_shape(a, model, u, j_set)
}

/// Core of the selection inequality: solve the restricted fit at `j`, then
/// compare the best remaining on-support score against the best
/// off-support one. Returns the margin and the restricted minimizer.
fn selection_margin(
    a: &MeasurementMatrix,
    model: &ConstraintModel,
    y: &[f64],
    supp: &[usize],
    j: &[usize],
    policy: &NumericPolicy,
) -> Result<(f64, Vec<f64>), CertifyError> {
    let sol = solve_restricted(a, y, model, j, policy)?;
    let mut best_in = f64::INFINITY;
    let mut best_out = f64::INFINITY;
    for c in 0..a.n_cols() {
        if j.binary_search(&c).is_ok() {
            continue;
        }
        let sc = coordinate_score(a, y, model, &sol.x, c, policy)?;
        if supp.binary_search(&c).is_ok() {
            best_in = best_in.min(sc.g_star);
        } else {
            best_out = best_out.min(sc.g_star);
        }
    }
    Ok((best_out - best_in, sol.x))
}

/// Margin of the greedy selection inequality at one (target, selection)
/// pair: positive when the best remaining on-support move strictly beats
/// every off-support move from the restricted minimizer at `j_set`.
///
/// `j_set` must be a proper subset of the target's support (the empty set
/// probes the first greedy step). When the support covers every column the
/// margin is `+inf`, since there is no off-support competitor.
pub fn condition_h_margin(
    a: &MeasurementMatrix,
    model: &ConstraintModel,
    u: &[f64],
    j_set: &[usize],
    policy: &NumericPolicy,
) -> Result<f64, CertifyError> {
    let inst = validate_instance(a, model, u, j_set, policy)?;
    let y = a.mul_vec(u);
    let (margin, _) = selection_margin(a, model, &y, &inst.supp, &inst.j, policy)?;
    Ok(margin)
}

/// Outcome of the sampled falsifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FalsifyReport {
    /// `greedy-selection` condition: `Fails` with an instance witness when
    /// a strict violation was found, `UndecidedSampled` otherwise.
    pub condition: ConditionReport,
    pub trials: usize,
    /// Number of (target, selection) pairs whose margin was evaluated.
    pub pairs_checked: u64,
    /// Trials discarded because the sampled vector left the constraint set
    /// (possible for coupled sets such as the weighted simplex).
    pub skipped: u64,
}

/// Randomized search for a violation of the greedy selection inequality
/// over targets with at most `k` nonzeros. Every proper subset of each
/// sampled support is probed, so `k` is capped by the same subset budget
/// as the fixed-support certifier.
pub fn condition_h_falsify(
    a: &MeasurementMatrix,
    model: &ConstraintModel,
    k: usize,
    trials: usize,
    seed: u64,
    policy: &NumericPolicy,
) -> Result<FalsifyReport, CertifyError> {
    let n = a.n_cols();
    if k == 0 || k > n {
        return Err(CertifyError::BadInput(format!(
            "sparsity level {k} is outside 1..={n}"
        )));
    }
    if model.n() != n {
        return Err(CertifyError::BadInput(
            "constraint set dimension does not match the matrix".into(),
        ));
    }
    if !model.is_convex() {
        return Err(CertifyError::BadInput(
            "the sampled falsifier requires a convex constraint set".into(),
        ));
    }
    if k > SUBSET_BUDGET {
        return Err(CertifyError::BudgetExceeded {
            needed: 1u128 << k,
            budget: 1u128 << SUBSET_BUDGET,
        });
    }

    // Admissible directions per coordinate, read off the slice through the
    // origin: (allow positive, positive cap, allow negative, negative cap).
    let zero = vec![0.0; n];
    let mut eligible: Vec<(usize, bool, f64, bool, f64)> = Vec::new();
    for c in 0..n {
        let iv = model.interval_at(&zero, c, policy)?;
        let pos = iv.hi > policy.cmp_tol;
        let neg = iv.lo < -policy.cmp_tol;
        if pos || neg {
            eligible.push((c, pos, iv.hi, neg, -iv.lo));
        }
    }
    if eligible.is_empty() {
        return Err(CertifyError::BadInput(
            "no coordinate admits a nonzero value".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = ConditionReport::new("greedy-selection", Verdict::UndecidedSampled);
    let mut worst = f64::INFINITY;
    let mut pairs_checked: u64 = 0;
    let mut skipped: u64 = 0;

    'trials: for _ in 0..trials {
        let s_len = rng.gen_range(1..=k.min(eligible.len()));
        let mut pool = eligible.clone();
        pool.shuffle(&mut rng);
        pool.truncate(s_len);
        let mut u = vec![0.0; n];
        for &(c, pos, pos_cap, neg, neg_cap) in &pool {
            let positive = if pos && neg { rng.gen_bool(0.5) } else { pos };
            let cap = if positive { pos_cap } else { neg_cap };
            let mag = 0.1 + 1.9 * rng.gen::<f64>();
            let mag = if cap.is_finite() { mag.min(cap) } else { mag };
            u[c] = if positive { mag } else { -mag };
        }
        if !model.contains(&u, policy) {
            skipped += 1;
            continue;
        }
        let mut supp: Vec<usize> = pool.iter().map(|&(c, ..)| c).collect();
        supp.sort_unstable();
        let y = a.mul_vec(&u);
        for mask in 0..(1u32 << supp.len()) - 1 {
            let j: Vec<usize> = supp
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &c)| c)
                .collect();
            let (margin, x) = selection_margin(a, model, &y, &supp, &j, policy)?;
            pairs_checked += 1;
            worst = worst.min(margin);
            if margin < -BOUNDARY_TOL {
                rep.verdict = Verdict::Fails;
                rep.witness = Some(Witness::Instance {
                    u: u.clone(),
                    j_set: j,
                    v: x,
                });
                break 'trials;
            }
        }
    }

    if worst.is_finite() {
        rep.numeric_margins
            .insert("worst".into(), Margin::from_value(worst, BOUNDARY_TOL));
    }
    Ok(FalsifyReport {
        condition: rep,
        trials,
        pairs_checked,
        skipped,
    })
}

/// How the constraint set clamps each remaining support coordinate at the
/// restricted minimizer, named by the shape of the admissible move
/// interval `[a, b]` (which always contains zero) and the position of the
/// unconstrained one-dimensional minimizer `t` relative to it. The six
/// sets partition the remaining support exactly.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MoveSets {
    /// `t < a < 0`: the move is cut short at the lower endpoint.
    pub clamped_low: Vec<usize>,
    /// `a = 0 < b`, `t <= b`: only upward moves are admissible.
    pub pinned_low: Vec<usize>,
    /// `t > b > 0`: the move is cut short at the upper endpoint.
    pub clamped_high: Vec<usize>,
    /// `a < 0 = b`, `t >= a`: only downward moves are admissible.
    pub pinned_high: Vec<usize>,
    /// `a < 0 < b`, `t` interior: the move is unconstrained.
    pub unconstrained: Vec<usize>,
    /// `a = 0 = b`: no move is admissible at all. A coordinate landing
    /// here defeats the emptiness condition below.
    pub frozen: Vec<usize>,
}

/// Per-instance certificate for one (target, selection) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceCertificate {
    pub j_set: Vec<usize>,
    pub sets: MoveSets,
    /// Sign compatibility: the target must point into the admissible
    /// halfline on every pinned coordinate.
    pub sign_condition: bool,
    /// `min(1, sqrt(endpoint / t))` over the clamped coordinates.
    pub shrink: f64,
    /// Class constants at `K = |supp(u)|`.
    pub constants: RecoveryConstants,
    /// Left side of the certificate inequality:
    /// `(1 - delta_hat) * shrink`.
    pub lhs: f64,
    /// Right side of the certificate inequality: `sqrt(K) * theta_hat`.
    pub rhs: f64,
    /// `lhs - rhs`, classified against the boundary band.
    pub margin: Margin,
    /// No frozen coordinate and every pinned coordinate signed correctly.
    pub c1_satisfied: bool,
    /// Strictly positive margin.
    pub c2_satisfied: bool,
    /// Both conditions together.
    pub satisfied: bool,
}

/// Builds the per-instance certificate for the greedy step at `(u, j_set)`:
/// classifies every remaining support coordinate by how the constraint set
/// clamps its candidate move, extracts the shrink factor, and combines it
/// with the class constants. The target does not have to be admissible;
/// only the restricted fit is. Errors with
/// [`CertifyError::NotIrreducible`] when the constraint set freezes some
/// coordinate at zero outright, since such a coordinate can never be
/// selected for any target.
pub fn instance_certificate(
    a: &MeasurementMatrix,
    model: &ConstraintModel,
    u: &[f64],
    j_set: &[usize],
    policy: &NumericPolicy,
) -> Result<InstanceCertificate, CertifyError> {
    if !model.is_convex() {
        return Err(CertifyError::BadInput(
            "the per-instance certificate requires a convex constraint set".into(),
        ));
    }
    let hull = model.conic_hull();
    if !hull.irreducible {
        return Err(CertifyError::NotIrreducible);
    }
    let inst = validate_shape(a, model, u, j_set)?;
    let y = a.mul_vec(u);
    let sol = solve_restricted(a, &y, model, &inst.j, policy)?;

    let tol = policy.cmp_tol;
    let mut sets = MoveSets::default();
    let mut sign_condition = true;
    let mut shrink: f64 = 1.0;
    for &c in &inst.supp {
        if inst.j.binary_search(&c).is_ok() {
            continue;
        }
        let sc = coordinate_score(a, &y, model, &sol.x, c, policy)?;
        let (lo, hi, t) = (sc.interval.lo, sc.interval.hi, sc.t_tilde);
        // The interval always contains zero, so `lo <= 0 <= hi` and the
        // endpoint tests reduce to one-sided comparisons.
        let lo_zero = lo >= -tol;
        let hi_zero = hi <= tol;
        if lo_zero && hi_zero {
            sets.frozen.push(c);
        } else if lo_zero {
            if t <= hi {
                sets.pinned_low.push(c);
                sign_condition &= u[c] > 0.0;
            } else {
                sets.clamped_high.push(c);
                shrink = shrink.min((hi / t).sqrt());
            }
        } else if hi_zero {
            if t >= lo {
                sets.pinned_high.push(c);
                sign_condition &= u[c] < 0.0;
            } else {
                sets.clamped_low.push(c);
                shrink = shrink.min((lo / t).sqrt());
            }
        } else if t > hi {
            sets.clamped_high.push(c);
            shrink = shrink.min((hi / t).sqrt());
        } else if t < lo {
            sets.clamped_low.push(c);
            shrink = shrink.min((lo / t).sqrt());
        } else {
            sets.unconstrained.push(c);
        }
    }

    let constants = recovery_constants(a, inst.supp.len(), &hull.cone, policy)?;
    let lhs = (1.0 - constants.delta_hat.value) * shrink;
    let rhs = (inst.supp.len() as f64).sqrt() * constants.theta_hat;
    let margin = Margin::from_value(lhs - rhs, BOUNDARY_TOL);
    let c1_satisfied = sets.frozen.is_empty() && sign_condition;
    let c2_satisfied = margin.state == MarginState::Holds;
    Ok(InstanceCertificate {
        j_set: inst.j,
        sets,
        sign_condition,
        shrink,
        constants,
        lhs,
        rhs,
        margin,
        c1_satisfied,
        c2_satisfied,
        satisfied: c1_satisfied && c2_satisfied,
    })
}

/// Stability of the class condition under matrix perturbations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub base_margin: f64,
    /// Smallest perturbation size the condition must survive:
    /// `1e-6 * margin / (2 * ||A||_2 + 1)`.
    pub threshold: f64,
    /// Perturbation sizes probed (Frobenius norm of the additive noise,
    /// before column renormalization), in increasing order.
    pub etas: Vec<f64>,
    /// Fraction of trials per size at which the condition stayed satisfied.
    pub survival: Vec<f64>,
    /// Largest probed size with full survival.
    pub largest_stable_eta: f64,
    pub stable: bool,
}

/// Probes whether the class condition keeps holding when the matrix
/// entries are perturbed and the columns renormalized. The base condition
/// must hold strictly.
pub fn perturbation_stability(
    a: &MeasurementMatrix,
    k: usize,
    classification: &ConeClassification,
    trials: usize,
    seed: u64,
    policy: &NumericPolicy,
) -> Result<PerturbationReport, CertifyError> {
    if trials == 0 {
        return Err(CertifyError::BadInput("at least one trial required".into()));
    }
    let base = recovery_constants(a, k, classification, policy)?;
    if base.margin.state != MarginState::Holds {
        return Err(CertifyError::BadInput(
            "the class condition does not hold strictly, nothing to perturb".into(),
        ));
    }
    let margin = base.margin.value;
    let scale = 2.0 * a.spectral_norm() + 1.0;
    let threshold = 1e-6 * margin / scale;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let etas: Vec<f64> = (0..6).map(|e| threshold * 10f64.powi(e)).collect();
    let mut survival = Vec::with_capacity(etas.len());
    let mut largest_stable_eta = 0.0;
    for &eta in &etas {
        let mut ok = 0usize;
        for _ in 0..trials {
            let mut noise: Vec<Vec<f64>> = a
                .columns()
                .iter()
                .map(|c| c.iter().map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
                .collect();
            let fro: f64 = noise
                .iter()
                .flat_map(|c| c.iter())
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt();
            let s = eta / fro;
            for (nc, ac) in noise.iter_mut().zip(a.columns()) {
                for (nv, av) in nc.iter_mut().zip(ac) {
                    *nv = av + s * *nv;
                }
            }
            let perturbed = MeasurementMatrix::from_columns(noise)?;
            let (perturbed, _) = normalize_columns(&perturbed)?;
            if recovery_constants(&perturbed, k, classification, policy)
                .map(|rc| rc.satisfied)
                .unwrap_or(false)
            {
                ok += 1;
            }
        }
        let frac = ok as f64 / trials as f64;
        survival.push(frac);
        if frac == 1.0 {
            largest_stable_eta = eta;
        }
    }
    Ok(PerturbationReport {
        base_margin: margin,
        threshold,
        etas,
        survival,
        largest_stable_eta,
        stable: largest_stable_eta >= threshold,
    })
}
