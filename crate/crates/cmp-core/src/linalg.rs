//! Dense numeric kernels: column-major measurement matrices, Gram caches,
//! Householder least squares, a cyclic Jacobi eigensolver, Schur complements,
//! and a small generic Gaussian solver that also runs over exact rationals.
//!
//! Everything here is deliberately dependency-free and sized for desk-scale
//! problems (tens of rows and columns); clarity and testability win over
//! blocked performance tricks.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::policy::NumericPolicy;

/// Field-like scalar for the generic elimination and certification paths.
/// `f64` and `BigRational` both satisfy the bounds.
pub trait Field: Clone + PartialOrd + Zero + One + Signed {}
impl<T> Field for T where T: Clone + PartialOrd + Zero + One + Signed {}

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Column index whose Euclidean norm is below the admissibility floor.
    ZeroColumn(usize),
    /// A least-squares system whose coefficient block lost full column rank.
    RankDeficient,
    /// A square block that must be inverted is singular at working precision.
    SingularBlock,
    /// Ragged or mismatched dimensions.
    Shape(String),
    NotFinite,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::ZeroColumn(j) => write!(f, "column {j} has (near-)zero norm"),
            LinalgError::RankDeficient => write!(f, "matrix is rank deficient"),
            LinalgError::SingularBlock => write!(f, "pivot block is singular"),
            LinalgError::Shape(msg) => write!(f, "shape mismatch: {msg}"),
            LinalgError::NotFinite => write!(f, "non-finite entry"),
        }
    }
}

impl std::error::Error for LinalgError {}

/// Norm floor below which a column counts as zero (violating admissibility).
pub const COLUMN_NORM_FLOOR: f64 = 1e-14;

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2_sq(x: &[f64]) -> f64 {
    dot(x, x)
}

pub fn norm2(x: &[f64]) -> f64 {
    norm2_sq(x).sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Dense matrix stored by columns, with cached column norms.
///
/// The column-major layout matches how every consumer walks the data: the
/// pursuit scores one column at a time and the restricted solvers assemble
/// column subsets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementMatrix {
    m: usize,
    n: usize,
    cols: Vec<Vec<f64>>,
    column_norms: Vec<f64>,
}

impl MeasurementMatrix {
    /// Builds from columns. Rejects ragged input, non-finite entries, and
    /// columns with norm below [`COLUMN_NORM_FLOOR`].
    pub fn from_columns(cols: Vec<Vec<f64>>) -> Result<Self, LinalgError> {
        if cols.is_empty() || cols[0].is_empty() {
            return Err(LinalgError::Shape("matrix must be nonempty".into()));
        }
        let m = cols[0].len();
        let mut column_norms = Vec::with_capacity(cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != m {
                return Err(LinalgError::Shape(format!(
                    "column {j} has length {} but expected {m}",
                    c.len()
                )));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(LinalgError::NotFinite);
            }
            let nrm = norm2(c);
            if nrm < COLUMN_NORM_FLOOR {
                return Err(LinalgError::ZeroColumn(j));
            }
            column_norms.push(nrm);
        }
        let n = cols.len();
        Ok(MeasurementMatrix {
            m,
            n,
            cols,
            column_norms,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(LinalgError::Shape("matrix must be nonempty".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        let cols = (0..n)
            .map(|j| rows.iter().map(|r| r[j]).collect())
            .collect();
        Self::from_columns(cols)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn n_cols(&self) -> usize {
        self.n
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.cols[j][i]
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        self.column_norms[j]
    }

    /// Column subselection (indices may repeat; order preserved).
    pub fn submatrix(&self, idx: &[usize]) -> MeasurementMatrix {
        let cols: Vec<Vec<f64>> = idx.iter().map(|&j| self.cols[j].clone()).collect();
        let column_norms = idx.iter().map(|&j| self.column_norms[j]).collect();
        MeasurementMatrix {
            m: self.m,
            n: idx.len(),
            cols,
            column_norms,
        }
    }

    /// `A x` for full-length `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let mut out = vec![0.0; self.m];
        for (j, c) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj != 0.0 {
                for (o, v) in out.iter_mut().zip(c) {
                    *o += xj * v;
                }
            }
        }
        out
    }

    /// `Aᵀ r`.
    pub fn mul_transpose_vec(&self, r: &[f64]) -> Vec<f64> {
        debug_assert_eq!(r.len(), self.m);
        self.cols.iter().map(|c| dot(c, r)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.cols
            .iter()
            .map(|c| norm2_sq(c))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest singular value, by power iteration on the normal matrix.
    /// Deterministic start vector; adequate for the perturbation bookkeeping
    /// where only a couple of digits matter.
    pub fn spectral_norm(&self) -> f64 {
        let mut v = vec![1.0 / (self.n as f64).sqrt(); self.n];
        let mut lambda = 0.0;
        for _ in 0..500 {
            let av = self.mul_vec(&v);
            let w = self.mul_transpose_vec(&av);
            let nw = norm2(&w);
            if nw == 0.0 {
                return 0.0;
            }
            let next: Vec<f64> = w.iter().map(|x| x / nw).collect();
            let new_lambda = nw;
            let done = (new_lambda - lambda).abs() <= 1e-14 * new_lambda.max(1.0);
            v = next;
            lambda = new_lambda;
            if done {
                break;
            }
        }
        lambda.sqrt()
    }
}

/// Rescales every column to unit norm; returns the new matrix and the scale
/// factors that were divided out (original norms).
pub fn normalize_columns(
    a: &MeasurementMatrix,
) -> Result<(MeasurementMatrix, Vec<f64>), LinalgError> {
    let mut cols = Vec::with_capacity(a.n);
    let mut scales = Vec::with_capacity(a.n);
    for (j, c) in a.cols.iter().enumerate() {
        let nrm = norm2(c);
        if nrm < COLUMN_NORM_FLOOR {
            return Err(LinalgError::ZeroColumn(j));
        }
        cols.push(c.iter().map(|v| v / nrm).collect());
        scales.push(nrm);
    }
    let mat = MeasurementMatrix::from_columns(cols)?;
    Ok((mat, scales))
}

/// Symmetric Gram matrix of column inner products, computed once and
/// mirrored so `theta(i, j) == theta(j, i)` holds exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramCache {
    n: usize,
    theta: Vec<Vec<f64>>,
}

impl GramCache {
    pub fn n_cols(&self) -> usize {
        self.n
    }

    pub fn theta(&self, i: usize, j: usize) -> f64 {
        self.theta[i][j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.theta[i]
    }

    /// Dense block `theta[rows × cols]`.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.theta[i][j]).collect())
            .collect()
    }
}

pub fn gram(a: &MeasurementMatrix) -> GramCache {
    let n = a.n_cols();
    let mut theta = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = dot(a.col(i), a.col(j));
            theta[i][j] = v;
            theta[j][i] = v;
        }
    }
    GramCache { n, theta }
}

/// Householder-QR least squares `min ‖A x − y‖₂`.
///
/// Errors with [`LinalgError::RankDeficient`] when a diagonal entry of `R`
/// falls below `rank_tol · ‖A‖_F`; callers that can live with rank-deficient
/// blocks (minimum-norm refits) catch that and take the eigen-based path in
/// the solver module.
pub fn least_squares(
    a: &MeasurementMatrix,
    y: &[f64],
    policy: &NumericPolicy,
) -> Result<Vec<f64>, LinalgError> {
    let m = a.rows();
    let p = a.n_cols();
    if y.len() != m {
        return Err(LinalgError::Shape(format!(
            "rhs has length {} but matrix has {m} rows",
            y.len()
        )));
    }
    if p > m {
        return Err(LinalgError::RankDeficient);
    }
    let scale = a.frobenius_norm();
    let mut w: Vec<Vec<f64>> = a.cols.clone();
    let mut rhs = y.to_vec();

    for k in 0..p {
        // Householder vector for the k-th column tail.
        let tail_norm = norm2(&w[k][k..]);
        if tail_norm < policy.rank_tol * scale {
            return Err(LinalgError::RankDeficient);
        }
        let alpha = if w[k][k] >= 0.0 { -tail_norm } else { tail_norm };
        let mut v: Vec<f64> = w[k][k..].to_vec();
        v[0] -= alpha;
        let vtv = norm2_sq(&v);
        if vtv > 0.0 {
            for col in w.iter_mut().skip(k) {
                let proj = 2.0 * dot(&v, &col[k..]) / vtv;
                for (t, vv) in v.iter().enumerate() {
                    col[k + t] -= proj * vv;
                }
            }
            let proj = 2.0 * dot(&v, &rhs[k..]) / vtv;
            for (t, vv) in v.iter().enumerate() {
                rhs[k + t] -= proj * vv;
            }
        }
        // Pin the diagonal to the computed alpha to avoid sign drift.
        w[k][k] = alpha;
        for t in k + 1..m {
            w[k][t] = 0.0;
        }
    }

    // Back substitution on the p×p upper triangle.
    let mut x = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = rhs[k];
        for t in k + 1..p {
            s -= w[t][k] * x[t];
        }
        let d = w[k][k];
        if d.abs() < policy.rank_tol * scale {
            return Err(LinalgError::RankDeficient);
        }
        x[k] = s / d;
    }
    Ok(x)
}

/// Full symmetric eigendecomposition by cyclic Jacobi sweeps. Returns
/// eigenvalues ascending with the matching orthonormal eigenvectors as
/// columns. Converged when the off-diagonal Frobenius mass drops below
/// `conv_tol · ‖M‖_F`.
pub fn jacobi_eigen(mat: &[Vec<f64>], policy: &NumericPolicy) -> (Vec<f64>, Vec<Vec<f64>>) {
    let p = mat.len();
    debug_assert!(mat.iter().all(|r| r.len() == p), "matrix must be square");
    if p == 0 {
        return (vec![], vec![]);
    }
    let mut a: Vec<Vec<f64>> = mat.to_vec();
    let mut vecs: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..p).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let fro: f64 = a
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    if fro == 0.0 {
        return (vec![0.0; p], vecs);
    }

    for _sweep in 0..100 {
        let off: f64 = {
            let mut s = 0.0;
            for i in 0..p {
                for j in 0..p {
                    if i != j {
                        s += a[i][j] * a[i][j];
                    }
                }
            }
            s.sqrt()
        };
        if off < policy.conv_tol * fro {
            break;
        }
        for pi in 0..p {
            for qi in pi + 1..p {
                let apq = a[pi][qi];
                if apq.abs() <= f64::EPSILON * fro {
                    continue;
                }
                let tau = (a[qi][qi] - a[pi][pi]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..p {
                    let akp = a[k][pi];
                    let akq = a[k][qi];
                    a[k][pi] = c * akp - s * akq;
                    a[k][qi] = s * akp + c * akq;
                }
                for k in 0..p {
                    let apk = a[pi][k];
                    let aqk = a[qi][k];
                    a[pi][k] = c * apk - s * aqk;
                    a[qi][k] = s * apk + c * aqk;
                }
                // Accumulate the rotation into the eigenvector columns.
                for k in 0..p {
                    let vkp = vecs[pi][k];
                    let vkq = vecs[qi][k];
                    vecs[pi][k] = c * vkp - s * vkq;
                    vecs[qi][k] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
    let eigs = order.iter().map(|&i| a[i][i]).collect();
    let vecs = order.iter().map(|&i| vecs[i].clone()).collect();
    (eigs, vecs)
}

/// Eigenvalues only, ascending.
pub fn jacobi_eigenvalues(mat: &[Vec<f64>], policy: &NumericPolicy) -> Vec<f64> {
    jacobi_eigen(mat, policy).0
}

pub fn min_eig_sym(mat: &[Vec<f64>], policy: &NumericPolicy) -> f64 {
    jacobi_eigenvalues(mat, policy)[0]
}

pub fn max_eig_sym(mat: &[Vec<f64>], policy: &NumericPolicy) -> f64 {
    *jacobi_eigenvalues(mat, policy).last().unwrap()
}

/// Solves `A X = B` for square `A` by Gaussian elimination with partial
/// pivoting, generically over `f64` or exact rationals. `B` is given and
/// returned as a list of columns. `eps` is the pivot floor (zero for exact
/// arithmetic).
pub fn gauss_solve<T: Field>(
    a: &[Vec<T>],
    b_cols: &[Vec<T>],
    eps: &T,
) -> Result<Vec<Vec<T>>, LinalgError> {
    let p = a.len();
    if a.iter().any(|r| r.len() != p) {
        return Err(LinalgError::Shape("square matrix required".into()));
    }
    if p == 0 {
        return Ok(b_cols.iter().map(|_| vec![]).collect());
    }
    let q = b_cols.len();
    if b_cols.iter().any(|c| c.len() != p) {
        return Err(LinalgError::Shape("rhs length mismatch".into()));
    }

    // Augmented working rows: [A | B].
    let mut w: Vec<Vec<T>> = (0..p)
        .map(|i| {
            let mut row: Vec<T> = a[i].clone();
            for c in b_cols {
                row.push(c[i].clone());
            }
            row
        })
        .collect();

    for k in 0..p {
        let pivot_row = (k..p)
            .max_by(|&i, &j| {
                w[i][k]
                    .abs()
                    .partial_cmp(&w[j][k].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if w[pivot_row][k].abs() <= *eps {
            return Err(LinalgError::SingularBlock);
        }
        w.swap(k, pivot_row);
        let pivot = w[k][k].clone();
        for i in 0..p {
            if i == k {
                continue;
            }
            let factor = w[i][k].clone() / pivot.clone();
            if factor.is_zero() {
                continue;
            }
            for t in k..p + q {
                let delta = factor.clone() * w[k][t].clone();
                w[i][t] = w[i][t].clone() - delta;
            }
        }
    }

    let mut out = vec![vec![T::zero(); p]; q];
    for (c, out_col) in out.iter_mut().enumerate() {
        for k in 0..p {
            out_col[k] = w[k][p + c].clone() / w[k][k].clone();
        }
    }
    Ok(out)
}

/// Schur complement `M / M[J,J]` of a symmetric matrix: the complement block
/// after eliminating the rows and columns in `J` (given in any order;
/// complement rows keep ascending order). `J = ∅` returns `M` itself.
pub fn schur_complement<T: Field>(
    m: &[Vec<T>],
    j_idx: &[usize],
    eps: &T,
) -> Result<Vec<Vec<T>>, LinalgError> {
    let p = m.len();
    if m.iter().any(|r| r.len() != p) {
        return Err(LinalgError::Shape("square matrix required".into()));
    }
    let mut j_sorted = j_idx.to_vec();
    j_sorted.sort_unstable();
    j_sorted.dedup();
    if j_sorted.iter().any(|&t| t >= p) {
        return Err(LinalgError::Shape("block index out of range".into()));
    }
    let k_idx: Vec<usize> = (0..p).filter(|t| !j_sorted.contains(t)).collect();
    if j_sorted.is_empty() {
        return Ok(k_idx
            .iter()
            .map(|&i| k_idx.iter().map(|&j| m[i][j].clone()).collect())
            .collect());
    }

    let a_jj: Vec<Vec<T>> = j_sorted
        .iter()
        .map(|&i| j_sorted.iter().map(|&j| m[i][j].clone()).collect())
        .collect();
    // Columns of M[J, K].
    let b_cols: Vec<Vec<T>> = k_idx
        .iter()
        .map(|&c| j_sorted.iter().map(|&r| m[r][c].clone()).collect())
        .collect();
    let x_cols = gauss_solve(&a_jj, &b_cols, eps)?;

    let r = k_idx.len();
    let mut out = vec![vec![T::zero(); r]; r];
    for (ri, &i) in k_idx.iter().enumerate() {
        for (ci, &c) in k_idx.iter().enumerate() {
            let mut acc = m[i][c].clone();
            for (ti, &t) in j_sorted.iter().enumerate() {
                let delta = m[i][t].clone() * x_cols[ci][ti].clone();
                acc = acc - delta;
            }
            out[ri][ci] = acc;
        }
    }
    Ok(out)
}

/// f64 convenience wrapper with a scale-aware pivot floor.
pub fn schur_complement_f64(
    m: &[Vec<f64>],
    j_idx: &[usize],
    policy: &NumericPolicy,
) -> Result<Vec<Vec<f64>>, LinalgError> {
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    schur_complement(m, j_idx, &(policy.rank_tol * scale))
}

/// Modified Gram-Schmidt orthonormal basis of the span of `cols`, dropping
/// directions whose remainder falls below `rank_tol` relative to the input
/// scale. Used to build orthogonal projectors without forming inverses.
pub fn orthonormal_cols(cols: &[Vec<f64>], policy: &NumericPolicy) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let scale = cols.iter().map(|c| norm2(c)).fold(0.0f64, f64::max).max(1.0);
    for c in cols {
        let mut v = c.clone();
        // Two rounds of projection for numerical robustness.
        for _ in 0..2 {
            for b in &basis {
                let proj = dot(b, &v);
                for (vv, bb) in v.iter_mut().zip(b) {
                    *vv -= proj * bb;
                }
            }
        }
        let nrm = norm2(&v);
        if nrm > policy.rank_tol * scale {
            basis.push(v.iter().map(|x| x / nrm).collect());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn pol() -> NumericPolicy {
        NumericPolicy::strict()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a} (tol {tol})");
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gram_matches_hand_computation() {
        // Columns (1,0), (1,1)/√2: inner product 1/√2.
        let s = 1.0 / 2.0f64.sqrt();
        let a =
            MeasurementMatrix::from_columns(vec![vec![1.0, 0.0], vec![s, s]]).unwrap();
        let g = gram(&a);
        assert_close(g.theta(0, 0), 1.0, 1e-15);
        assert_close(g.theta(1, 1), 1.0, 1e-15);
        assert_close(g.theta(0, 1), s, 1e-15);
        assert_eq!(g.theta(0, 1), g.theta(1, 0));
    }

    #[test]
    fn zero_column_rejected() {
        let err = MeasurementMatrix::from_columns(vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert_eq!(err.unwrap_err(), LinalgError::ZeroColumn(1));
    }

    #[test]
    fn normalize_returns_scales() {
        let a =
            MeasurementMatrix::from_columns(vec![vec![3.0, 4.0], vec![0.0, 2.0]]).unwrap();
        let (unit, scales) = normalize_columns(&a).unwrap();
        assert_close(scales[0], 5.0, 1e-15);
        assert_close(scales[1], 2.0, 1e-15);
        assert_close(norm2(unit.col(0)), 1.0, 1e-15);
        assert_close(norm2(unit.col(1)), 1.0, 1e-15);
    }

    #[test]
    fn least_squares_overdetermined() {
        // Normal equations solved by hand:
        // A = [[1,0],[0,1],[1,1]], y = (1,2,3) -> AᵀA = [[2,1],[1,2]],
        // Aᵀy = (4,5), solution (1,2) exactly.
        let a = MeasurementMatrix::from_columns(vec![
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 1.0],
        ])
        .unwrap();
        let x = least_squares(&a, &[1.0, 2.0, 3.0], &pol()).unwrap();
        assert_close(x[0], 1.0, 1e-12);
        assert_close(x[1], 2.0, 1e-12);
        // Residual orthogonality: Aᵀ(y − Ax) = 0.
        let r: Vec<f64> = a
            .mul_vec(&x)
            .iter()
            .zip(&[1.0, 2.0, 3.0])
            .map(|(ax, y)| y - ax)
            .collect();
        let g = a.mul_transpose_vec(&r);
        assert!(norm_inf(&g) <= 1e-12);
    }

    #[test]
    fn least_squares_detects_rank_deficiency() {
        let a = MeasurementMatrix::from_columns(vec![
            vec![1.0, 1.0, 0.0],
            vec![2.0, 2.0, 0.0],
        ])
        .unwrap();
        assert_eq!(
            least_squares(&a, &[1.0, 0.0, 0.0], &pol()).unwrap_err(),
            LinalgError::RankDeficient
        );
    }

    #[test]
    fn jacobi_two_by_two() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let eigs = jacobi_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]], &pol());
        assert_close(eigs[0], 1.0, 1e-12);
        assert_close(eigs[1], 3.0, 1e-12);
    }

    #[test]
    fn jacobi_equicorrelation_block() {
        // M = (4/3)I − (1/3)(J − I) off-diagonal −1/3 everywhere, ones on the
        // diagonal: eigenvalues 1 − 2·(1/3) = 1/3 (ones vector) and
        // 1 + 1/3 = 4/3 (doubled). Trace 3 and determinant 16/27 pin it down.
        let t = -1.0 / 3.0;
        let m = vec![
            vec![1.0, t, t],
            vec![t, 1.0, t],
            vec![t, t, 1.0],
        ];
        let eigs = jacobi_eigenvalues(&m, &pol());
        assert_close(eigs[0], 1.0 / 3.0, 1e-12);
        assert_close(eigs[1], 4.0 / 3.0, 1e-12);
        assert_close(eigs[2], 4.0 / 3.0, 1e-12);
        assert_close(min_eig_sym(&m, &pol()), 1.0 / 3.0, 1e-12);
    }

    #[test]
    fn jacobi_eigenvectors_reconstruct_matrix() {
        let t = -1.0 / 3.0;
        let m = vec![
            vec![1.0, t, t],
            vec![t, 1.0, t],
            vec![t, t, 1.0],
        ];
        let (eigs, vecs) = jacobi_eigen(&m, &pol());
        for i in 0..3 {
            for j in 0..3 {
                let mut rebuilt = 0.0;
                for k in 0..3 {
                    rebuilt += eigs[k] * vecs[k][i] * vecs[k][j];
                }
                assert_close(rebuilt, m[i][j], 1e-10);
                let ortho: f64 = (0..3).map(|k| vecs[i][k] * vecs[j][k]).sum();
                assert_close(ortho, if i == j { 1.0 } else { 0.0 }, 1e-10);
            }
        }
    }

    #[test]
    fn schur_two_by_two() {
        let m = vec![vec![1.0, 0.5], vec![0.5, 1.0]];
        let s = schur_complement_f64(&m, &[1], &pol()).unwrap();
        assert_eq!(s.len(), 1);
        assert_close(s[0][0], 1.0 - 0.25, 1e-15);
        // Empty block: identity operation.
        let s0 = schur_complement_f64(&m, &[], &pol()).unwrap();
        assert_eq!(s0, m);
    }

    #[test]
    fn schur_rational_exact() {
        // M = [[1, 1/2, 1/3], [1/2, 1, 1/4], [1/3, 1/4, 1]], J = {0}:
        // S = M[1..,1..] − m m^T with m = (1/2, 1/3):
        // [[3/4, 1/4 − 1/6], [1/4 − 1/6, 8/9]].
        let m = vec![
            vec![rat(1, 1), rat(1, 2), rat(1, 3)],
            vec![rat(1, 2), rat(1, 1), rat(1, 4)],
            vec![rat(1, 3), rat(1, 4), rat(1, 1)],
        ];
        let s = schur_complement(&m, &[0], &BigRational::zero()).unwrap();
        assert_eq!(s[0][0], rat(3, 4));
        assert_eq!(s[0][1], rat(1, 12));
        assert_eq!(s[1][0], rat(1, 12));
        assert_eq!(s[1][1], rat(8, 9));
    }

    #[test]
    fn gauss_solve_singular_detected() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let err = gauss_solve(&a, &[vec![1.0, 1.0]], &1e-12);
        assert_eq!(err.unwrap_err(), LinalgError::SingularBlock);
    }

    #[test]
    fn spectral_norm_diagonal() {
        let a =
            MeasurementMatrix::from_columns(vec![vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_close(a.spectral_norm(), 3.0, 1e-10);
    }

    #[test]
    fn orthonormal_cols_drops_dependent() {
        let cols = vec![
            vec![1.0, 0.0, 0.0],
            vec![2.0, 0.0, 0.0],
            vec![0.0, 5.0, 0.0],
        ];
        let basis = orthonormal_cols(&cols, &pol());
        assert_eq!(basis.len(), 2);
        assert_close(dot(&basis[0], &basis[1]).abs(), 0.0, 1e-14);
    }

    #[test]
    fn mul_round_trip() {
        let a = MeasurementMatrix::from_rows(&[
            vec![1.0, 2.0, 0.0],
            vec![0.0, 1.0, -1.0],
        ])
        .unwrap();
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 0.0]);
        assert_eq!(a.mul_transpose_vec(&[1.0, 1.0]), vec![1.0, 3.0, -1.0]);
    }
}
