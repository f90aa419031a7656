//! Linear feasibility via a dense phase-1 simplex, generic over `f64` and
//! exact rationals.
//!
//! Everything the certification layer asks of linear programming reduces to
//! one primitive: is `{x ≥ 0 : E x = d}` nonempty, possibly with a side
//! condition that a designated group of variables does not vanish? The
//! latter is homogeneous in the group, so it is normalized by appending
//! `Σ_group x_i − s = 1` with a fresh slack `s ≥ 0`.
//!
//! The solver is a textbook phase-1 simplex with Bland's rule (smallest
//! index on entry and exit), which terminates without anti-cycling drama.
//! On infeasibility the dual vector read off the final tableau is a Farkas
//! certificate: `yᵀE ≤ 0` componentwise with `yᵀd > 0`. Over rationals all
//! tolerances are zero and every answer is exact.

use std::fmt;

use crate::linalg::Field;

#[derive(Debug, Clone, PartialEq)]
pub enum LpError {
    Shape(String),
    /// The pivot count exceeded the safety cap. With Bland's rule this
    /// indicates a bug or a pathological input, not cycling.
    IterationLimit,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            LpError::IterationLimit => write!(f, "simplex iteration limit exceeded"),
        }
    }
}

impl std::error::Error for LpError {}

/// `{x ≥ 0 : e·x = d}`, optionally with `Σ_{i ∈ strict_group} x_i ≥ 1`
/// (the normalized form of "the group does not vanish").
#[derive(Clone, Debug)]
pub struct FeasibilitySystem<T> {
    pub e: Vec<Vec<T>>,
    pub d: Vec<T>,
    pub strict_group: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility<T> {
    /// A point of the system, re-verified against the rows before returning.
    Feasible { x: Vec<T> },
    /// Farkas certificate `y` (in original row order, sign-corrected):
    /// `yᵀE ≤ 0` componentwise and `yᵀd > 0`. When a strict group was
    /// normalized, its synthetic row participates as the last entry.
    Infeasible { farkas: Vec<T>, objective: T },
    /// The phase-1 optimum landed inside the ambiguity band, or a float
    /// witness failed re-verification.
    Ambiguous { objective: T },
}

/// Decides feasibility of `sys`. `eps_lo < eps_hi` bracket the ambiguity
/// band for the phase-1 objective: below `eps_lo` is feasible, above
/// `eps_hi` infeasible, in between ambiguous. Pass zeros for exact
/// arithmetic, where the band collapses and `Ambiguous` cannot occur.
pub fn feasible_eq_nonneg<T: Field>(
    sys: &FeasibilitySystem<T>,
    eps_lo: &T,
    eps_hi: &T,
) -> Result<Feasibility<T>, LpError> {
    let n_orig = sys.e.first().map_or(0, |r| r.len());
    if sys.e.len() != sys.d.len() {
        return Err(LpError::Shape("row/rhs count mismatch".into()));
    }
    if sys.e.iter().any(|r| r.len() != n_orig) {
        return Err(LpError::Shape("ragged rows".into()));
    }

    // Assemble working rows; append the normalization row if present.
    let mut rows: Vec<Vec<T>> = sys.e.clone();
    let mut rhs: Vec<T> = sys.d.clone();
    let mut n_vars = n_orig;
    if let Some(group) = &sys.strict_group {
        if group.iter().any(|&i| i >= n_orig) {
            return Err(LpError::Shape("strict group index out of range".into()));
        }
        let mut row = vec![T::zero(); n_orig + 1];
        for &i in group {
            row[i] = row[i].clone() + T::one();
        }
        row[n_orig] = -T::one(); // slack
        for r in &mut rows {
            r.push(T::zero());
        }
        rows.push(row);
        rhs.push(T::one());
        n_vars = n_orig + 1;
    }
    let p = rows.len();

    // Normalize to nonnegative right-hand sides, remembering flips so the
    // Farkas vector can be reported against the original orientation.
    let mut flipped = vec![false; p];
    for i in 0..p {
        if rhs[i] < T::zero() {
            flipped[i] = true;
            rhs[i] = -rhs[i].clone();
            for v in rows[i].iter_mut() {
                *v = -v.clone();
            }
        }
    }

    // Tableau: columns [x (n_vars) | artificials (p) | rhs]; artificial
    // basis; phase-1 objective min Σ artificials.
    let width = n_vars + p + 1;
    let mut t: Vec<Vec<T>> = Vec::with_capacity(p + 1);
    for i in 0..p {
        let mut row = vec![T::zero(); width];
        row[..n_vars].clone_from_slice(&rows[i]);
        row[n_vars + i] = T::one();
        row[width - 1] = rhs[i].clone();
        t.push(row);
    }
    // Reduced-cost row: r_j = c_j − Σ_i tableau[i][j] with c = (0…0, 1…1);
    // the trailing cell carries −(current objective).
    let mut z = vec![T::zero(); width];
    for j in 0..width {
        let mut s = T::zero();
        for row in t.iter().take(p) {
            s = s + row[j].clone();
        }
        let c_j = if (n_vars..n_vars + p).contains(&j) {
            T::one()
        } else {
            T::zero()
        };
        z[j] = c_j - s;
    }

    let mut basis: Vec<usize> = (n_vars..n_vars + p).collect();
    let max_pivots = 200_000usize;
    for _pivot in 0..max_pivots {
        // Bland entry: smallest column index with negative reduced cost.
        let entering = (0..n_vars + p).find(|&j| z[j] < -eps_lo.clone());
        let Some(je) = entering else { break };

        // Ratio test; Bland tie-break on the leaving basis variable index.
        let mut leave: Option<(usize, T)> = None;
        for i in 0..p {
            if t[i][je] > eps_lo.clone() {
                let ratio = t[i][width - 1].clone() / t[i][je].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && basis[i] < basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((li, _)) = leave else {
            // Unbounded phase-1 objective cannot happen (it is bounded below
            // by zero); reaching here means numeric trouble.
            return Ok(Feasibility::Ambiguous {
                objective: -z[width - 1].clone(),
            });
        };

        // Pivot on (li, je).
        let piv = t[li][je].clone();
        for v in t[li].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        for i in 0..p {
            if i != li && !t[i][je].is_zero() {
                let f = t[i][je].clone();
                for jj in 0..width {
                    let delta = f.clone() * t[li][jj].clone();
                    t[i][jj] = t[i][jj].clone() - delta;
                }
            }
        }
        if !z[je].is_zero() {
            let f = z[je].clone();
            for jj in 0..width {
                let delta = f.clone() * t[li][jj].clone();
                z[jj] = z[jj].clone() - delta;
            }
        }
        basis[li] = je;
        if _pivot + 1 == max_pivots {
            return Err(LpError::IterationLimit);
        }
    }

    let objective = -z[width - 1].clone();

    if objective <= *eps_lo {
        // Read the solution for the original variables.
        let mut x = vec![T::zero(); n_orig];
        for (i, &b) in basis.iter().enumerate() {
            if b < n_orig {
                x[b] = t[i][width - 1].clone();
            }
        }
        // Nonnegativity can be dented by roundoff; clamp tiny negatives.
        for v in x.iter_mut() {
            if *v < T::zero() {
                if -v.clone() <= *eps_hi {
                    *v = T::zero();
                } else {
                    return Ok(Feasibility::Ambiguous { objective });
                }
            }
        }
        // Fresh re-verification against the original rows.
        let slack_tol = verification_tol(eps_hi);
        for (row, d_i) in sys.e.iter().zip(&sys.d) {
            let mut acc = -d_i.clone();
            for (c, xi) in row.iter().zip(&x) {
                acc = acc + c.clone() * xi.clone();
            }
            if acc.abs() > slack_tol {
                return Ok(Feasibility::Ambiguous { objective });
            }
        }
        if let Some(group) = &sys.strict_group {
            let mut s = T::zero();
            for &i in group {
                s = s + x[i].clone();
            }
            if s + slack_tol.clone() < T::one() {
                return Ok(Feasibility::Ambiguous { objective });
            }
        }
        return Ok(Feasibility::Feasible { x });
    }

    if objective > *eps_hi {
        // Farkas vector: y_i = 1 − (reduced cost of artificial i), undoing
        // row flips. Certifies yᵀE ≤ 0, yᵀd = objective > 0.
        let mut farkas = Vec::with_capacity(p);
        for i in 0..p {
            let yi = T::one() - z[n_vars + i].clone();
            farkas.push(if flipped[i] { -yi } else { yi });
        }
        // Fresh certificate check (exact mode: must hold exactly).
        let slack_tol = verification_tol(eps_hi);
        for j in 0..n_vars {
            let mut s = T::zero();
            for i in 0..p {
                let coeff = if flipped[i] {
                    -rows[i][j].clone()
                } else {
                    rows[i][j].clone()
                };
                s = s + farkas[i].clone() * coeff;
            }
            if s > slack_tol {
                return Ok(Feasibility::Ambiguous { objective });
            }
        }
        let mut yd = T::zero();
        for i in 0..p {
            let d_i = if flipped[i] {
                -rhs[i].clone()
            } else {
                rhs[i].clone()
            };
            yd = yd + farkas[i].clone() * d_i;
        }
        if yd <= slack_tol {
            return Ok(Feasibility::Ambiguous { objective });
        }
        return Ok(Feasibility::Infeasible { farkas, objective });
    }

    Ok(Feasibility::Ambiguous { objective })
}

/// Re-verification slack: scales with the ambiguity band so that the exact
/// path (band zero) demands exact satisfaction.
fn verification_tol<T: Field>(eps_hi: &T) -> T {
    // 10 · eps_hi, computed without a float literal so rationals stay exact.
    let mut s = T::zero();
    for _ in 0..10 {
        s = s + eps_hi.clone();
    }
    s
}

/// Witness for the Motzkin alternative `u + D_σ H w = 0` with
/// `0 ≠ u ≥ 0`, `w ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MotzkinWitness<T> {
    pub u: Vec<T>,
    pub w: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlternativeOutcome<T> {
    Witness(MotzkinWitness<T>),
    /// The alternative is infeasible, so the strict primal system
    /// `{v : D_σ v > 0, Hᵀ v ≥ 0}` is solvable; the Farkas vector of the
    /// phase-1 failure is attached for diagnostics.
    NoWitness { farkas: Vec<T> },
    Ambiguous,
}

/// Decides the Motzkin alternative for a row-sign pattern: does
/// `u + D_σ H w = 0` admit `0 ≠ u ≥ 0, w ≥ 0`? By transposition this is
/// equivalent to the emptiness of `{v : D_σ v > 0, Hᵀ v ≥ 0}`.
pub fn motzkin_alternative<T: Field>(
    h: &[Vec<T>],
    sigma: &[i8],
    eps_lo: &T,
    eps_hi: &T,
) -> Result<AlternativeOutcome<T>, LpError> {
    let r = h.len();
    if sigma.len() != r {
        return Err(LpError::Shape("sign pattern length mismatch".into()));
    }
    let c = h.first().map_or(0, |row| row.len());
    // Variables (u, w); rows u_i + σ_i Σ_k h[i][k] w_k = 0.
    let mut e = Vec::with_capacity(r);
    for i in 0..r {
        let mut row = vec![T::zero(); r + c];
        row[i] = T::one();
        for k in 0..c {
            let v = h[i][k].clone();
            row[r + k] = if sigma[i] < 0 { -v } else { v };
        }
        e.push(row);
    }
    let sys = FeasibilitySystem {
        e,
        d: vec![T::zero(); r],
        strict_group: Some((0..r).collect()),
    };
    match feasible_eq_nonneg(&sys, eps_lo, eps_hi)? {
        Feasibility::Feasible { x } => Ok(AlternativeOutcome::Witness(MotzkinWitness {
            u: x[..r].to_vec(),
            w: x[r..].to_vec(),
        })),
        Feasibility::Infeasible { farkas, .. } => Ok(AlternativeOutcome::NoWitness { farkas }),
        Feasibility::Ambiguous { .. } => Ok(AlternativeOutcome::Ambiguous),
    }
}

/// Decides the Motzkin alternative for a general pair of row blocks: does
/// `Bᵀu + Gᵀw = 0` admit `0 ≠ u ≥ 0, w ≥ 0`? By transposition this is
/// equivalent to the emptiness of `{v : Bv > 0 componentwise, Gv ≥ 0}`.
/// Unlike [`motzkin_alternative`], the strict block `b` may contain
/// arbitrary rows rather than signed coordinate directions. `g` may be
/// empty; all rows must share the column count (the dimension of `v`).
pub fn motzkin_alternative_blocks<T: Field>(
    b: &[Vec<T>],
    g: &[Vec<T>],
    eps_lo: &T,
    eps_hi: &T,
) -> Result<AlternativeOutcome<T>, LpError> {
    let r = b.len();
    let c = g.len();
    let dim = b
        .first()
        .or_else(|| g.first())
        .map_or(0, |row| row.len());
    if b.iter().chain(g.iter()).any(|row| row.len() != dim) {
        return Err(LpError::Shape("block column counts differ".into()));
    }
    // Variables (u, w); one equality row per dimension of v.
    let mut e = Vec::with_capacity(dim);
    for d in 0..dim {
        let mut row = vec![T::zero(); r + c];
        for (l, b_row) in b.iter().enumerate() {
            row[l] = b_row[d].clone();
        }
        for (i, g_row) in g.iter().enumerate() {
            row[r + i] = g_row[d].clone();
        }
        e.push(row);
    }
    let sys = FeasibilitySystem {
        e,
        d: vec![T::zero(); dim],
        strict_group: Some((0..r).collect()),
    };
    match feasible_eq_nonneg(&sys, eps_lo, eps_hi)? {
        Feasibility::Feasible { x } => Ok(AlternativeOutcome::Witness(MotzkinWitness {
            u: x[..r].to_vec(),
            w: x[r..r + c].to_vec(),
        })),
        Feasibility::Infeasible { farkas, .. } => Ok(AlternativeOutcome::NoWitness { farkas }),
        Feasibility::Ambiguous { .. } => Ok(AlternativeOutcome::Ambiguous),
    }
}

/// Finds `v` with `v ≥ 1` componentwise and `rows·v ≥ rhs`, or reports the
/// system empty. This is the witness-recovery companion to
/// [`motzkin_alternative`]: strict positivity is normalized to a unit lower
/// bound, sound because the target systems are homogeneous.
pub fn solve_ge_with_unit_lower_bound<T: Field>(
    rows: &[Vec<T>],
    rhs: &[T],
    eps_lo: &T,
    eps_hi: &T,
) -> Result<Option<Vec<T>>, LpError> {
    if rows.len() != rhs.len() {
        return Err(LpError::Shape("row/rhs count mismatch".into()));
    }
    let n = rows.first().map_or(0, |r| r.len());
    if n == 0 {
        return Ok(Some(vec![]));
    }
    // v = 1 + s with s ≥ 0; per row: Σ r_k s_k − t_row = rhs − Σ r_k.
    let p = rows.len();
    let mut e = Vec::with_capacity(p);
    let mut d = Vec::with_capacity(p);
    for (row, b) in rows.iter().zip(rhs) {
        let mut er = vec![T::zero(); n + p];
        er[..n].clone_from_slice(row);
        let idx = e.len();
        er[n + idx] = -T::one();
        let mut row_sum = T::zero();
        for r_k in row {
            row_sum = row_sum + r_k.clone();
        }
        e.push(er);
        d.push(b.clone() - row_sum);
    }
    let sys = FeasibilitySystem {
        e,
        d,
        strict_group: None,
    };
    match feasible_eq_nonneg(&sys, eps_lo, eps_hi)? {
        Feasibility::Feasible { x } => {
            let v = x[..n].iter().map(|s| T::one() + s.clone()).collect();
            Ok(Some(v))
        }
        Feasibility::Infeasible { .. } | Feasibility::Ambiguous { .. } => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    const LO: f64 = 1e-11;
    const HI: f64 = 1e-9;

    fn solve_f64(
        e: Vec<Vec<f64>>,
        d: Vec<f64>,
        group: Option<Vec<usize>>,
    ) -> Feasibility<f64> {
        feasible_eq_nonneg(
            &FeasibilitySystem {
                e,
                d,
                strict_group: group,
            },
            &LO,
            &HI,
        )
        .unwrap()
    }

    #[test]
    fn simple_feasible_system() {
        let out = solve_f64(vec![vec![1.0, 1.0]], vec![1.0], None);
        match out {
            Feasibility::Feasible { x } => {
                assert!((x[0] + x[1] - 1.0).abs() < 1e-9);
                assert!(x.iter().all(|&v| v >= 0.0));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_with_farkas() {
        // x₁ + x₂ = −1 over x ≥ 0 is empty.
        let out = solve_f64(vec![vec![1.0, 1.0]], vec![-1.0], None);
        match out {
            Feasibility::Infeasible { farkas, objective } => {
                assert!(objective > 0.5);
                // yᵀE ≤ 0 and yᵀd > 0 with E = [1 1], d = −1.
                assert!(farkas[0] <= 1e-9);
                assert!(farkas[0] * -1.0 > 0.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn strict_group_discriminates() {
        // x₁ − x₂ = 0 has the nonzero solution ray x₁ = x₂.
        let out = solve_f64(vec![vec![1.0, -1.0]], vec![0.0], Some(vec![0, 1]));
        match out {
            Feasibility::Feasible { x } => {
                assert!((x[0] - x[1]).abs() < 1e-9);
                assert!(x[0] + x[1] >= 1.0 - 1e-9);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
        // x₁ = 0 and x₂ = 0 individually: the group cannot be nonzero.
        let out = solve_f64(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![0.0, 0.0],
            Some(vec![0, 1]),
        );
        assert!(matches!(out, Feasibility::Infeasible { .. }));
    }

    #[test]
    fn degenerate_system_terminates() {
        // Redundant rows force degenerate pivots; Bland's rule must still
        // terminate with the right answer.
        let out = solve_f64(
            vec![
                vec![1.0, 1.0, 0.0],
                vec![1.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            vec![1.0, 1.0, 0.0],
            None,
        );
        assert!(matches!(out, Feasibility::Feasible { .. }));
    }

    #[test]
    fn rational_exact_no_ambiguity() {
        // Same system as strict_group_discriminates, exact.
        let zero = BigRational::zero();
        let sys = FeasibilitySystem {
            e: vec![vec![rat(1, 1), rat(-1, 1)]],
            d: vec![rat(0, 1)],
            strict_group: Some(vec![0, 1]),
        };
        match feasible_eq_nonneg(&sys, &zero, &zero).unwrap() {
            Feasibility::Feasible { x } => {
                assert_eq!(x[0], x[1]);
                assert!(x[0].clone() + x[1].clone() >= rat(1, 1));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn motzkin_alternative_two_sided() {
        // H = [[1], [−1]]: rows of Hᵀ v ≥ 0 force v₁ = v₂ impossible? Here
        // v ∈ ℝ²: Hᵀ v = v₁ − v₂ ≥ 0 is satisfiable with v > 0, so for
        // σ = (+,+) the alternative must have no witness.
        let h = vec![vec![1.0], vec![-1.0]];
        let out = motzkin_alternative(&h, &[1, 1], &LO, &HI).unwrap();
        assert!(matches!(out, AlternativeOutcome::NoWitness { .. }));

        // H = [[−1], [−1]]: Hᵀ v = −v₁ − v₂ ≥ 0 has no positive solution,
        // so a witness must exist: u = (1, 1)·t, w with u = D_σ H w… take
        // w = e₁: D_σHw = (−1, −1), u = (1, 1).
        let h = vec![vec![-1.0], vec![-1.0]];
        match motzkin_alternative(&h, &[1, 1], &LO, &HI).unwrap() {
            AlternativeOutcome::Witness(wit) => {
                assert!(wit.u.iter().sum::<f64>() > 0.5);
                // Verify u + D_σ H w = 0 freshly.
                for i in 0..2 {
                    let hw: f64 = wit.w.iter().zip(&h[i]).map(|(w, h)| w * h).sum();
                    assert!((wit.u[i] + hw).abs() < 1e-9);
                }
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn unit_lower_bound_recovery() {
        // rows·v ≥ rhs with v ≥ 1: v₁ − v₂ ≥ 0 and v₁ + v₂ ≥ 3.
        let v = solve_ge_with_unit_lower_bound(
            &[vec![1.0, -1.0], vec![1.0, 1.0]],
            &[0.0, 3.0],
            &LO,
            &HI,
        )
        .unwrap()
        .expect("system is satisfiable");
        assert!(v[0] >= 1.0 - 1e-9 && v[1] >= 1.0 - 1e-9);
        assert!(v[0] - v[1] >= -1e-9);
        assert!(v[0] + v[1] >= 3.0 - 1e-9);

        // Contradictory: v₁ ≥ 1 and −v₁ ≥ 0.
        let none =
            solve_ge_with_unit_lower_bound(&[vec![-1.0]], &[0.0], &LO, &HI).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn blocks_alternative_mirrors_primal_emptiness() {
        // {v > 0, −v₁ − v₂ ≥ 0} is empty: witness u = (1,1), w = (1).
        let out = motzkin_alternative_blocks(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![-1.0, -1.0]],
            &LO,
            &HI,
        )
        .unwrap();
        match out {
            AlternativeOutcome::Witness(MotzkinWitness { u, w }) => {
                // Bᵀu + Gᵀw = 0 re-verified by hand.
                assert!((u[0] - w[0]).abs() <= 1e-9);
                assert!((u[1] - w[0]).abs() <= 1e-9);
                assert!(u.iter().sum::<f64>() > 1e-3);
            }
            other => panic!("expected witness, got {other:?}"),
        }

        // {v > 0, v₁ − v₂ ≥ 0} has v = (2,1): no witness.
        let out = motzkin_alternative_blocks(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![1.0, -1.0]],
            &LO,
            &HI,
        )
        .unwrap();
        assert!(matches!(out, AlternativeOutcome::NoWitness { .. }));

        // Strict block with a non-coordinate row: {v₁ > 0, v₁ + v₂ > 0,
        // −v₁ ≥ 0} is empty; witness exists in exact arithmetic.
        let out = motzkin_alternative_blocks(
            &[vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(1, 1)]],
            &[vec![rat(-1, 1), rat(0, 1)], vec![rat(0, 1), rat(-1, 1)]],
            &BigRational::zero(),
            &BigRational::zero(),
        )
        .unwrap();
        assert!(matches!(out, AlternativeOutcome::Witness(_)));
    }

    #[test]
    fn farkas_certificate_verified_fresh() {
        // Random-ish infeasible system: x₁ + x₂ = 1, x₁ + x₂ = 2.
        let out = solve_f64(
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            vec![1.0, 2.0],
            None,
        );
        match out {
            Feasibility::Infeasible { farkas, .. } => {
                let e = [[1.0, 1.0], [1.0, 1.0]];
                let d = [1.0, 2.0];
                for j in 0..2 {
                    let s: f64 = (0..2).map(|i| farkas[i] * e[i][j]).sum();
                    assert!(s <= 1e-9, "Farkas column condition violated");
                }
                let yd: f64 = (0..2).map(|i| farkas[i] * d[i]).sum();
                assert!(yd > 1e-3, "Farkas objective condition violated");
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }
}
