//! Hand-built worked instances and random-instance generators shared by
//! tests, the certification suite, and the command-line demos.
//!
//! The centerpiece is a four-column unit-norm matrix, stored as exact
//! rational coefficients against per-row square-root scales, whose
//! restricted Gram matrix has the equicorrelation pattern that defeats
//! greedy support selection on a three-element support even though the
//! classical exact-recovery coefficient sum equals one. All derived
//! quantities (Gram matrix, score-difference generators, sign-pattern
//! witnesses) are available in exact arithmetic so the certification layer
//! can check them without floating-point doubt.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::constraint::{ConeClassification, ConeKind};
use crate::linalg::MeasurementMatrix;

/// Radicands of the per-row scale factors: row `i` of the matrix carries a
/// factor `√RADICANDS[i]`.
pub const RADICANDS: [i64; 4] = [1, 2, 6, 10];

/// Rational coefficients, row-major: entry `(i, j)` of the matrix equals
/// `COEFFS[i][j] · √RADICANDS[i]` with each pair read as `num/den`.
pub const COEFFS: [[(i64, i64); 4]; 4] = [
    [(1, 1), (-1, 3), (-1, 3), (1, 3)],
    [(0, 1), (2, 3), (-1, 3), (1, 3)],
    [(0, 1), (0, 1), (1, 3), (-1, 12)],
    [(0, 1), (0, 1), (0, 1), (1, 4)],
];

/// Convenience constructor for exact rationals.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The 4×4 counterexample matrix in floating point. Columns have exact unit
/// norm by construction.
pub fn counterexample_matrix() -> MeasurementMatrix {
    let mut cols = vec![vec![0.0f64; 4]; 4];
    for (i, row) in COEFFS.iter().enumerate() {
        let scale = (RADICANDS[i] as f64).sqrt();
        for (j, &(num, den)) in row.iter().enumerate() {
            cols[j][i] = num as f64 / den as f64 * scale;
        }
    }
    MeasurementMatrix::from_columns(cols).expect("fixture columns are nonzero")
}

/// Exact Gram matrix `AᵀA`: the square-root row scales cancel into the
/// integer radicands, so every entry is rational.
pub fn counterexample_gram_exact() -> Vec<Vec<BigRational>> {
    let mut theta = vec![vec![BigRational::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = BigRational::zero();
            for (r, row) in COEFFS.iter().enumerate() {
                let (ni, di) = row[i];
                let (nj, dj) = row[j];
                acc += rat(ni, di) * rat(nj, dj) * rat(RADICANDS[r], 1);
            }
            theta[i][j] = acc;
        }
    }
    theta
}

/// Correlation columns `h_i = A_Sᵀ A_{•i}` for the distinguished support
/// `S = {0, 1, 2}`, including the off-support column `h₄`.
pub fn counterexample_h_vectors() -> [Vec<BigRational>; 4] {
    let theta = counterexample_gram_exact();
    let pick = |col: usize| -> Vec<BigRational> {
        (0..3).map(|row| theta[row][col].clone()).collect()
    };
    [pick(0), pick(1), pick(2), pick(3)]
}

/// The 3×6 generator matrix whose columns are `h₄ ± h_i` for `i = 1, 2, 3`,
/// given as rows for the sign-pattern feasibility systems.
pub fn counterexample_h_rows() -> Vec<Vec<BigRational>> {
    let [h1, h2, h3, h4] = counterexample_h_vectors();
    let mut rows = vec![vec![BigRational::zero(); 6]; 3];
    for (k, hi) in [h1, h2, h3].iter().enumerate() {
        for r in 0..3 {
            rows[r][2 * k] = &h4[r] + &hi[r];
            rows[r][2 * k + 1] = &h4[r] - &hi[r];
        }
    }
    rows
}

/// Exact inverse of the restricted Gram block `A_SᵀA_S` for `S = {0,1,2}`:
/// `(3/4)·[[2,1,1],[1,2,1],[1,1,2]]`.
pub fn counterexample_restricted_inverse() -> Vec<Vec<BigRational>> {
    let mut inv = vec![vec![BigRational::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = if i == j { rat(3, 2) } else { rat(3, 4) };
        }
    }
    inv
}

/// One feasibility witness `(σ, u, w)` per sign pattern: `u + D_σ H w = 0`
/// with `0 ≠ u ≥ 0` and `w ≥ 0`, in lexicographic σ order with `+1` first.
pub fn counterexample_witnesses() -> Vec<([i8; 3], Vec<BigRational>, Vec<BigRational>)> {
    let e = |k: usize| -> Vec<BigRational> {
        (0..6)
            .map(|i| if i == k { BigRational::one() } else { BigRational::zero() })
            .collect()
    };
    let u_half = vec![BigRational::zero(), BigRational::zero(), rat(1, 2)];
    let u_mixed = vec![rat(2, 3), rat(2, 3), rat(1, 6)];
    vec![
        ([1, 1, 1], vec![BigRational::zero(), BigRational::zero(), rat(1, 3)], {
            let mut w = e(1);
            w[3] = BigRational::one();
            w
        }),
        ([1, 1, -1], u_half.clone(), e(4)),
        ([1, -1, 1], u_mixed.clone(), e(1)),
        ([1, -1, -1], u_half.clone(), e(4)),
        ([-1, 1, 1], u_mixed, e(3)),
        ([-1, 1, -1], u_half.clone(), e(4)),
        ([-1, -1, 1], vec![rat(4, 3), BigRational::zero(), rat(5, 6)], e(0)),
        ([-1, -1, -1], u_half, e(4)),
    ]
}

/// Widen the counterexample to an `m×n` matrix (`m ≥ 4`, `n ≥ 4`): extra
/// columns alternate `+A₄, −A₄, …` and extra rows are zero. All appended
/// columns keep unit norm, and the distinguished support keeps its scores,
/// so the failure persists at any size.
pub fn counterexample_extension(m: usize, n: usize) -> MeasurementMatrix {
    assert!(m >= 4 && n >= 4, "extension only grows the base fixture");
    let base = counterexample_matrix();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let src = if j < 4 { base.col(j).to_vec() } else { base.col(3).to_vec() };
        let sign = if j >= 4 && (j - 4) % 2 == 1 { -1.0 } else { 1.0 };
        let mut col: Vec<f64> = src.into_iter().map(|v| sign * v).collect();
        col.resize(m, 0.0);
        cols.push(col);
    }
    MeasurementMatrix::from_columns(cols).expect("extension columns are nonzero")
}

/// The 1×2 worked instance for the nonconvex demo set: one measurement row
/// `[3/4, 1]` with observation `3/2`.
pub fn example21_matrix() -> MeasurementMatrix {
    MeasurementMatrix::from_columns(vec![vec![0.75], vec![1.0]]).expect("nonzero")
}

pub const EXAMPLE21_Y: f64 = 1.5;

/// Endpoints of the flat optimal segment reached at the second step of the
/// demo instance: from `(2/3, 1)` on the top edge to the curve crossing at
/// `x₂ = (√22 − 2)/3`.
pub fn example21_segment() -> ([f64; 2], [f64; 2]) {
    let q2 = (22.0f64.sqrt() - 2.0) / 3.0;
    ([2.0 / 3.0, 1.0], [q2 * q2, q2])
}

/// `true` when every entry of the vector is nonnegative.
pub fn all_nonneg(v: &[BigRational]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

/// Random matrix with independent standard-normal entries and columns
/// rescaled to unit Euclidean norm. Deterministic given the generator
/// state, so seeded callers get reproducible instances.
pub fn random_unit_columns(m: usize, n: usize, rng: &mut impl Rng) -> MeasurementMatrix {
    assert!(m > 0 && n > 0, "matrix must be nonempty");
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|_| loop {
            let c: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
            let norm = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 1e-8 {
                break c.into_iter().map(|v| v / norm).collect();
            }
        })
        .collect();
    MeasurementMatrix::from_columns(cols).expect("normalized gaussian columns are nonzero")
}

/// Random full-support target on `support`: magnitudes uniform on
/// `(0.1, 2]`, signs dictated by the cone classification (free coordinates
/// flip a fair coin). Panics if the support touches a `{0}` coordinate,
/// which admits no nonzero value.
pub fn random_target(
    class: &ConeClassification,
    support: &[usize],
    rng: &mut impl Rng,
) -> Vec<f64> {
    let mut z = vec![0.0; class.n()];
    for &j in support {
        let mag = 0.1 + 1.9 * rng.gen::<f64>();
        z[j] = match class.kind_of(j) {
            ConeKind::Free => {
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            }
            ConeKind::Plus => mag,
            ConeKind::Minus => -mag,
            ConeKind::Zero => panic!("a {{0}} coordinate admits no nonzero target value"),
        };
    }
    z
}

/// Full-support grid targets on `support`: each supported coordinate takes
/// `points` distinct nonzero values with magnitudes spread evenly over
/// `[lo, hi]`, signed according to its cone kind (free coordinates split
/// the point budget across both signs). Yields `points^|support|` targets.
pub fn grid_targets(
    class: &ConeClassification,
    support: &[usize],
    points: usize,
    lo: f64,
    hi: f64,
) -> Vec<Vec<f64>> {
    assert!(points > 0 && lo > 0.0 && hi >= lo, "need a positive magnitude range");
    let n = class.n();
    if support.is_empty() {
        return vec![vec![0.0; n]];
    }
    let spread = |count: usize| -> Vec<f64> {
        (0..count)
            .map(|t| {
                if count == 1 {
                    hi
                } else {
                    lo + (hi - lo) * t as f64 / (count - 1) as f64
                }
            })
            .collect()
    };
    let values: Vec<Vec<f64>> = support
        .iter()
        .map(|&j| match class.kind_of(j) {
            ConeKind::Free => {
                let neg = points / 2;
                let mut v: Vec<f64> = spread(neg).into_iter().map(|m| -m).collect();
                v.extend(spread(points - neg));
                v
            }
            ConeKind::Plus => spread(points),
            ConeKind::Minus => spread(points).into_iter().map(|m| -m).collect(),
            ConeKind::Zero => panic!("a {{0}} coordinate admits no nonzero grid value"),
        })
        .collect();
    let mut out = Vec::with_capacity(values.iter().map(Vec::len).product());
    let mut idx = vec![0usize; support.len()];
    'outer: loop {
        let mut z = vec![0.0; n];
        for (pos, &j) in support.iter().enumerate() {
            z[j] = values[pos][idx[pos]];
        }
        out.push(z);
        let mut carry = 0;
        loop {
            idx[carry] += 1;
            if idx[carry] < values[carry].len() {
                break;
            }
            idx[carry] = 0;
            carry += 1;
            if carry == support.len() {
                break 'outer;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gram;

    #[test]
    fn columns_have_unit_norm() {
        let a = counterexample_matrix();
        for j in 0..4 {
            assert!((a.column_norm(j) - 1.0).abs() < 1e-12);
        }
        let theta = counterexample_gram_exact();
        for j in 0..4 {
            assert_eq!(theta[j][j], BigRational::one());
        }
    }

    #[test]
    fn exact_gram_matches_frozen_correlations() {
        let theta = counterexample_gram_exact();
        // Within the distinguished support every pair correlates at −1/3.
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(theta[i][j], rat(-1, 3));
                }
            }
        }
        assert_eq!(theta[3][0], rat(1, 3));
        assert_eq!(theta[3][1], rat(1, 3));
        assert_eq!(theta[3][2], rat(-1, 2));
        // Symmetry.
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(theta[i][j], theta[j][i]);
            }
        }
    }

    #[test]
    fn float_gram_agrees_with_exact() {
        let a = counterexample_matrix();
        let g = gram(&a);
        let theta = counterexample_gram_exact();
        for i in 0..4 {
            for j in 0..4 {
                let num: f64 = theta[i][j].numer().to_string().parse().unwrap();
                let den: f64 = theta[i][j].denom().to_string().parse().unwrap();
                assert!((g.theta(i, j) - num / den).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn h_rows_are_sum_and_difference_columns() {
        let rows = counterexample_h_rows();
        let expect_first_row = [rat(4, 3), rat(-2, 3), rat(0, 1), rat(2, 3), rat(0, 1), rat(2, 3)];
        assert_eq!(rows[0], expect_first_row.to_vec());
        let expect_third_row = [
            rat(-5, 6),
            rat(-1, 6),
            rat(-5, 6),
            rat(-1, 6),
            rat(1, 2),
            rat(-3, 2),
        ];
        assert_eq!(rows[2], expect_third_row.to_vec());
    }

    #[test]
    fn witnesses_solve_their_sign_systems_exactly() {
        let rows = counterexample_h_rows();
        let witnesses = counterexample_witnesses();
        assert_eq!(witnesses.len(), 8);
        let mut seen: Vec<[i8; 3]> = vec![];
        for (sigma, u, w) in &witnesses {
            assert!(!seen.contains(sigma), "duplicate sign pattern");
            seen.push(*sigma);
            assert!(all_nonneg(u) && all_nonneg(w));
            assert!(u.iter().any(|v| !v.is_zero()), "u must be nonzero");
            for r in 0..3 {
                let mut acc = u[r].clone();
                let s = rat(sigma[r] as i64, 1);
                for k in 0..6 {
                    acc += &s * &rows[r][k] * &w[k];
                }
                assert!(acc.is_zero(), "σ = {sigma:?}, row {r} residual {acc}");
            }
        }
    }

    #[test]
    fn restricted_inverse_is_exact() {
        let theta = counterexample_gram_exact();
        let inv = counterexample_restricted_inverse();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = BigRational::zero();
                for k in 0..3 {
                    acc += &theta[i][k] * &inv[k][j];
                }
                let expect = if i == j { BigRational::one() } else { BigRational::zero() };
                assert_eq!(acc, expect);
            }
        }
    }

    #[test]
    fn classical_coefficient_sum_is_exactly_one() {
        // ‖(A_SᵀA_S)⁻¹ A_Sᵀ A₄‖₁ = 3/8 + 3/8 + 1/4 = 1: the classical
        // sufficient condition holds with no slack.
        let inv = counterexample_restricted_inverse();
        let [_, _, _, h4] = counterexample_h_vectors();
        let mut one_norm = BigRational::zero();
        let mut entries = vec![];
        for row in &inv {
            let mut acc = BigRational::zero();
            for (c, h) in row.iter().zip(h4.iter()) {
                acc += c * h;
            }
            one_norm += acc.abs();
            entries.push(acc);
        }
        assert_eq!(entries, vec![rat(3, 8), rat(3, 8), rat(-1, 4)]);
        assert_eq!(one_norm, BigRational::one());
    }

    #[test]
    fn extension_pads_with_signed_copies_and_zero_rows() {
        let b = counterexample_extension(6, 6);
        assert_eq!(b.rows(), 6);
        assert_eq!(b.n_cols(), 6);
        let base = counterexample_matrix();
        for j in 0..4 {
            for i in 0..4 {
                assert_eq!(b.entry(i, j), base.entry(i, j));
            }
            assert_eq!(b.entry(4, j), 0.0);
            assert_eq!(b.entry(5, j), 0.0);
        }
        for i in 0..4 {
            assert_eq!(b.entry(i, 4), base.entry(i, 3));
            assert_eq!(b.entry(i, 5), -base.entry(i, 3));
        }
        for j in 0..6 {
            assert!((b.column_norm(j) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_generators_respect_their_contracts() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a = random_unit_columns(5, 9, &mut rng);
        assert_eq!(a.rows(), 5);
        assert_eq!(a.n_cols(), 9);
        for j in 0..9 {
            assert!((a.column_norm(j) - 1.0).abs() < 1e-12);
        }
        // Same seed, same matrix.
        let mut rng2 = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let b = random_unit_columns(5, 9, &mut rng2);
        for j in 0..9 {
            for i in 0..5 {
                assert_eq!(a.entry(i, j), b.entry(i, j));
            }
        }

        let class = ConeClassification {
            i1: vec![0],
            iplus: vec![1],
            iminus: vec![2],
            i0: vec![],
        };
        for _ in 0..50 {
            let z = random_target(&class, &[0, 1, 2], &mut rng);
            assert!(z[0] != 0.0 && z[0].abs() > 0.1 && z[0].abs() <= 2.0);
            assert!(z[1] > 0.1 && z[1] <= 2.0);
            assert!(z[2] < -0.1 && z[2] >= -2.0);
        }
    }

    #[test]
    fn grid_targets_cover_the_sign_pattern_lattice() {
        let class = ConeClassification {
            i1: vec![0],
            iplus: vec![1],
            iminus: vec![],
            i0: vec![],
        };
        let grid = grid_targets(&class, &[0, 1], 4, 0.5, 2.0);
        assert_eq!(grid.len(), 16);
        // Free coordinate: two negative and two positive values; plus
        // coordinate: all positive. No zeros anywhere on the support.
        let c0: std::collections::BTreeSet<_> =
            grid.iter().map(|z| (z[0] * 1e6) as i64).collect();
        assert_eq!(c0.len(), 4);
        assert_eq!(c0.iter().filter(|&&v| v < 0).count(), 2);
        for z in &grid {
            assert!(z[0] != 0.0 && z[1] >= 0.5 && z[1] <= 2.0);
        }
        // Magnitude endpoints are hit exactly.
        assert!(grid.iter().any(|z| z[1] == 0.5));
        assert!(grid.iter().any(|z| z[1] == 2.0));
    }

    #[test]
    fn demo_segment_endpoints_are_consistent() {
        let a = example21_matrix();
        let (p, q) = example21_segment();
        for pt in [p, q] {
            let ax = a.mul_vec(&pt);
            assert!((ax[0] - EXAMPLE21_Y).abs() < 1e-12);
        }
        // q sits exactly on the curved boundary, p on the top edge.
        assert!((q[0] - q[1] * q[1]).abs() < 1e-15);
        assert_eq!(p[1], 1.0);
    }
}
