//! Feasible-set models and their coordinate geometry.
//!
//! The pursuit only ever interrogates a feasible set `P` through a small
//! interface: membership, the one-dimensional slice `I_j(v) = {t : v + t·e_j ∈ P}`
//! through a feasible point, Euclidean projection, and the cone bookkeeping
//! (classification, compact-plus-cone splitting, conic hull). Three models
//! cover the supported geometry:
//!
//! * [`ConstraintModel::BoxProduct`]: products of intervals, each containing
//!   zero; covers the free space, orthants, mixed sign cones, and boxes;
//! * [`ConstraintModel::WeightedSimplex`]: `{x ≥ 0, wᵀx ≤ cap}`;
//! * [`ConstraintModel::NonconvexDemo`]: a fixed two-dimensional nonconvex
//!   union (a curved region glued to a segment) used to exercise the
//!   pursuit when slices fall apart into several pieces and the refit
//!   problem has non-unique solutions.

use std::fmt;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::policy::NumericPolicy;

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintError {
    /// The query point is not a member of the feasible set.
    NotMember,
    /// The set is not a product cone.
    NotACone,
    /// Construction-time validation failure.
    InvalidModel(String),
}

impl fmt::Display for ConstraintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintError::NotMember => write!(f, "point is not in the feasible set"),
            ConstraintError::NotACone => write!(f, "feasible set is not a product cone"),
            ConstraintError::InvalidModel(msg) => write!(f, "invalid constraint model: {msg}"),
        }
    }
}

impl std::error::Error for ConstraintError {}

/// Closed interval on the extended real line. `truncated` flags slices of the
/// nonconvex demo set where a disconnected piece of `I_j(v)` was dropped and
/// only the component containing zero is reported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedInterval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub truncated: bool,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl ExtendedInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        ExtendedInterval {
            lo,
            hi,
            truncated: false,
        }
    }

    pub fn truncated(lo: f64, hi: f64) -> Self {
        ExtendedInterval {
            lo,
            hi,
            truncated: true,
        }
    }

    pub fn clamp(&self, t: f64) -> f64 {
        t.max(self.lo).min(self.hi)
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

/// Coordinate kind of a product cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeKind {
    Free,
    Plus,
    Minus,
    Zero,
}

/// Partition of coordinate indices by cone kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ConeClassification {
    pub i1: Vec<usize>,
    pub iplus: Vec<usize>,
    pub iminus: Vec<usize>,
    pub i0: Vec<usize>,
}

impl ConeClassification {
    pub fn n(&self) -> usize {
        self.i1.len() + self.iplus.len() + self.iminus.len() + self.i0.len()
    }

    pub fn kind_of(&self, j: usize) -> ConeKind {
        if self.i1.contains(&j) {
            ConeKind::Free
        } else if self.iplus.contains(&j) {
            ConeKind::Plus
        } else if self.iminus.contains(&j) {
            ConeKind::Minus
        } else {
            ConeKind::Zero
        }
    }

    pub fn all_free(n: usize) -> Self {
        ConeClassification {
            i1: (0..n).collect(),
            ..Default::default()
        }
    }

    pub fn all_plus(n: usize) -> Self {
        ConeClassification {
            iplus: (0..n).collect(),
            ..Default::default()
        }
    }

    /// The product cone as a box model (useful for round trips in tests and
    /// for running the pursuit on a conic hull).
    pub fn to_box_model(&self) -> ConstraintModel {
        let n = self.n();
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for j in 0..n {
            match self.kind_of(j) {
                ConeKind::Free => {
                    lower[j] = f64::NEG_INFINITY;
                    upper[j] = f64::INFINITY;
                }
                ConeKind::Plus => upper[j] = f64::INFINITY,
                ConeKind::Minus => lower[j] = f64::NEG_INFINITY,
                ConeKind::Zero => {}
            }
        }
        ConstraintModel::BoxProduct { lower, upper }
    }
}

/// Conic hull of a feasible set, coordinate-wise, with the irreducibility
/// flag (no frozen coordinates).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConicHull {
    pub cone: ConeClassification,
    pub irreducible: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintModel {
    /// Product of intervals `[lower_j, upper_j]`, each containing zero.
    /// Bounds may be infinite.
    BoxProduct { lower: Vec<f64>, upper: Vec<f64> },
    /// `{x ≥ 0 : wᵀx ≤ cap}` with strictly positive weights and cap.
    WeightedSimplex { weights: Vec<f64>, cap: f64 },
    /// Fixed two-dimensional nonconvex union:
    /// `{x ≥ 0, x₂ ≤ 1, x₁ ≤ x₂²} ∪ {(x₁, 0) : x₁ ∈ [0, 1]}`.
    NonconvexDemo,
}

impl ConstraintModel {
    pub fn box_product(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ConstraintError> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(ConstraintError::InvalidModel(
                "bounds must be nonempty and of equal length".into(),
            ));
        }
        for (j, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if l.is_nan() || u.is_nan() {
                return Err(ConstraintError::InvalidModel(format!(
                    "NaN bound at coordinate {j}"
                )));
            }
            if !(l <= 0.0 && 0.0 <= u) {
                return Err(ConstraintError::InvalidModel(format!(
                    "coordinate {j}: interval [{l}, {u}] must contain zero"
                )));
            }
        }
        Ok(ConstraintModel::BoxProduct { lower, upper })
    }

    pub fn weighted_simplex(weights: Vec<f64>, cap: f64) -> Result<Self, ConstraintError> {
        if weights.is_empty() {
            return Err(ConstraintError::InvalidModel("empty weights".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(ConstraintError::InvalidModel(
                "weights must be strictly positive and finite".into(),
            ));
        }
        if !(cap > 0.0) || !cap.is_finite() {
            return Err(ConstraintError::InvalidModel(
                "cap must be strictly positive and finite".into(),
            ));
        }
        Ok(ConstraintModel::WeightedSimplex { weights, cap })
    }

    pub fn free(n: usize) -> Self {
        ConstraintModel::BoxProduct {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn nonneg(n: usize) -> Self {
        ConstraintModel::BoxProduct {
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ConstraintModel::BoxProduct { lower, .. } => lower.len(),
            ConstraintModel::WeightedSimplex { weights, .. } => weights.len(),
            ConstraintModel::NonconvexDemo => 2,
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, ConstraintModel::NonconvexDemo)
    }

    /// Membership with an additive tolerance on bound constraints and a
    /// cap-scaled tolerance on the simplex inequality.
    pub fn contains(&self, x: &[f64], policy: &NumericPolicy) -> bool {
        if x.len() != self.n() {
            return false;
        }
        let tol = policy.cmp_tol;
        match self {
            ConstraintModel::BoxProduct { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&l, &u))| v >= l - tol && v <= u + tol),
            ConstraintModel::WeightedSimplex { weights, cap } => {
                x.iter().all(|&v| v >= -tol)
                    && x.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>()
                        <= cap + tol * (1.0 + cap.abs())
            }
            ConstraintModel::NonconvexDemo => {
                let (x1, x2) = (x[0], x[1]);
                let in_curve = x1 >= -tol
                    && x2 >= -tol
                    && x2 <= 1.0 + tol
                    && x1 <= x2 * x2 + tol;
                let in_segment = x2.abs() <= tol && x1 >= -tol && x1 <= 1.0 + tol;
                in_curve || in_segment
            }
        }
    }

    /// The slice `I_j(v) = {t : v + t·e_j ∈ P}` through a feasible `v`.
    ///
    /// For the nonconvex demo the slice may be a disjoint union; the
    /// component containing zero is returned and the dropped piece is
    /// signalled through [`ExtendedInterval::truncated`].
    pub fn interval_at(
        &self,
        v: &[f64],
        j: usize,
        policy: &NumericPolicy,
    ) -> Result<ExtendedInterval, ConstraintError> {
        if !self.contains(v, policy) {
            return Err(ConstraintError::NotMember);
        }
        debug_assert!(j < self.n());
        let tol = policy.cmp_tol;
        let iv = match self {
            ConstraintModel::BoxProduct { lower, upper } => {
                ExtendedInterval::new(lower[j] - v[j], upper[j] - v[j])
            }
            ConstraintModel::WeightedSimplex { weights, cap } => {
                let load: f64 = v.iter().zip(weights).map(|(x, w)| x * w).sum();
                let hi = ((cap - load) / weights[j]).max(0.0);
                ExtendedInterval::new(-v[j], hi)
            }
            ConstraintModel::NonconvexDemo => {
                let (v1, v2) = (v[0], v[1]);
                if j == 0 {
                    if v2 > tol {
                        // Curved region: x₁ ranges over [0, v₂²].
                        ExtendedInterval::new(-v1, v2 * v2 - v1)
                    } else {
                        // On the segment: x₁ ranges over [0, 1].
                        ExtendedInterval::new(-v1, 1.0 - v1)
                    }
                } else if v1 <= tol {
                    // x₁ ≈ 0: the curve constraint x₁ ≤ x₂² is inactive,
                    // so x₂ ranges over the full [0, 1].
                    ExtendedInterval::new(-v2, 1.0 - v2)
                } else {
                    // x₁ > 0 fixed: the curved region needs x₂ ≥ √x₁ and the
                    // segment contributes the isolated point x₂ = 0.
                    let root = v1.max(0.0).sqrt();
                    if v2.abs() <= tol {
                        // Sitting on the segment: the zero-containing
                        // component is the single point t = 0.
                        ExtendedInterval::truncated(0.0, 0.0)
                    } else {
                        let lo = root - v2;
                        let hi = 1.0 - v2;
                        // The segment point x₂ = 0 is a second component
                        // whenever x₁ ≤ 1.
                        let has_segment_piece = v1 <= 1.0 + tol;
                        if has_segment_piece {
                            ExtendedInterval::truncated(lo.min(0.0), hi)
                        } else {
                            ExtendedInterval::new(lo.min(0.0), hi)
                        }
                    }
                }
            }
        };
        debug_assert!(
            iv.lo <= tol && iv.hi >= -tol,
            "slice through a feasible point must contain zero"
        );
        Ok(ExtendedInterval {
            lo: iv.lo.min(0.0),
            hi: iv.hi.max(0.0),
            truncated: iv.truncated,
        })
    }

    /// Euclidean projection onto the feasible set. Exact for boxes and the
    /// weighted simplex; for the nonconvex demo the curved branch is
    /// minimized numerically (the demo is a fixture, not a performance
    /// surface).
    pub fn coordinate_project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ConstraintModel::BoxProduct { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&v, (&l, &u))| v.max(l).min(u))
                .collect(),
            ConstraintModel::WeightedSimplex { weights, cap } => {
                project_weighted_simplex(x, weights, *cap)
            }
            ConstraintModel::NonconvexDemo => {
                let seg = vec![x[0].clamp(0.0, 1.0), 0.0];
                let curve = project_demo_curve(x);
                let d = |p: &[f64]| {
                    (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2)
                };
                if d(&curve) <= d(&seg) {
                    curve
                } else {
                    seg
                }
            }
        }
    }

    /// Coordinate-wise cone classification; errors unless every coordinate
    /// slice is one of `ℝ`, `ℝ₊`, `ℝ₋`, `{0}`.
    pub fn classify_cone(&self) -> Result<ConeClassification, ConstraintError> {
        match self {
            ConstraintModel::BoxProduct { lower, upper } => {
                let mut c = ConeClassification::default();
                for (j, (&l, &u)) in lower.iter().zip(upper).enumerate() {
                    match (l == f64::NEG_INFINITY, l == 0.0, u == 0.0, u == f64::INFINITY) {
                        (true, _, _, true) => c.i1.push(j),
                        (_, true, _, true) => c.iplus.push(j),
                        (true, _, true, _) => c.iminus.push(j),
                        (_, true, true, _) => c.i0.push(j),
                        _ => return Err(ConstraintError::NotACone),
                    }
                }
                Ok(c)
            }
            _ => Err(ConstraintError::NotACone),
        }
    }

    /// Splits `P = W + K` into a compact part and a recession cone,
    /// coordinate-wise for boxes:
    ///
    /// * both bounds finite: `W = [l, u]`, `K = {0}`;
    /// * `[l, +∞)`: `W = [l, 0]`, `K = ℝ₊`;
    /// * `(-∞, u]`: `W = [0, u]`, `K = ℝ₋`;
    /// * the whole line: `W = {0}`, `K = ℝ`.
    ///
    /// Bounded models (simplex, demo) return themselves with a trivial cone.
    pub fn decompose(&self) -> (ConstraintModel, ConeClassification) {
        match self {
            ConstraintModel::BoxProduct { lower, upper } => {
                let n = lower.len();
                let mut w_lower = vec![0.0; n];
                let mut w_upper = vec![0.0; n];
                let mut cone = ConeClassification::default();
                for j in 0..n {
                    match (lower[j].is_finite(), upper[j].is_finite()) {
                        (true, true) => {
                            w_lower[j] = lower[j];
                            w_upper[j] = upper[j];
                            cone.i0.push(j);
                        }
                        (true, false) => {
                            w_lower[j] = lower[j];
                            cone.iplus.push(j);
                        }
                        (false, true) => {
                            w_upper[j] = upper[j];
                            cone.iminus.push(j);
                        }
                        (false, false) => {
                            cone.i1.push(j);
                        }
                    }
                }
                (
                    ConstraintModel::BoxProduct {
                        lower: w_lower,
                        upper: w_upper,
                    },
                    cone,
                )
            }
            other => {
                let mut cone = ConeClassification::default();
                cone.i0 = (0..other.n()).collect();
                (other.clone(), cone)
            }
        }
    }

    /// Coordinate-wise conic hull with the irreducibility flag
    /// (irreducible = no coordinate is frozen at zero).
    pub fn conic_hull(&self) -> ConicHull {
        let cone = match self {
            ConstraintModel::BoxProduct { lower, upper } => {
                let mut c = ConeClassification::default();
                for (j, (&l, &u)) in lower.iter().zip(upper).enumerate() {
                    match (l < 0.0, u > 0.0) {
                        (true, true) => c.i1.push(j),
                        (false, true) => c.iplus.push(j),
                        (true, false) => c.iminus.push(j),
                        (false, false) => c.i0.push(j),
                    }
                }
                c
            }
            ConstraintModel::WeightedSimplex { weights, .. } => {
                ConeClassification::all_plus(weights.len())
            }
            ConstraintModel::NonconvexDemo => ConeClassification::all_plus(2),
        };
        let irreducible = cone.i0.is_empty();
        ConicHull { cone, irreducible }
    }

    /// Largest support size attainable inside the set.
    pub fn dimension(&self) -> usize {
        let hull = self.conic_hull();
        self.n() - hull.cone.i0.len()
    }
}

/// Exact Euclidean projection onto `{x ≥ 0 : wᵀx ≤ cap}`.
///
/// First clips to the orthant; if the cap is still violated the solution has
/// the form `x_i = max(z_i − λ w_i, 0)` where `λ > 0` makes the cap active.
/// `φ(λ) = Σ w_i · max(z_i − λ w_i, 0)` is piecewise linear and strictly
/// decreasing until it hits zero, so the exact `λ` is found by sorting the
/// breakpoints `z_i / w_i`.
pub fn project_weighted_simplex(z: &[f64], weights: &[f64], cap: f64) -> Vec<f64> {
    let clipped: Vec<f64> = z.iter().map(|&v| v.max(0.0)).collect();
    let load: f64 = clipped.iter().zip(weights).map(|(x, w)| x * w).sum();
    if load <= cap {
        return clipped;
    }
    let mut bps: Vec<f64> = z
        .iter()
        .zip(weights)
        .map(|(&zi, &wi)| zi / wi)
        .filter(|b| *b > 0.0)
        .collect();
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Walk λ upward through the breakpoints; on each segment
    // φ(λ) = s1 − λ·s2 over the active set {i : z_i/w_i > λ}.
    let mut lambda_prev = 0.0;
    for &bp in &bps {
        let (s1, s2) = active_sums(z, weights, lambda_prev);
        let phi_prev = s1 - lambda_prev * s2;
        let phi_bp = s1 - bp * s2;
        if phi_bp <= cap {
            let lambda = if s2 > 0.0 {
                lambda_prev + (phi_prev - cap) / s2
            } else {
                bp
            };
            return apply_lambda(z, weights, lambda);
        }
        lambda_prev = bp;
    }
    // cap > 0 guarantees termination before exhausting the breakpoints.
    apply_lambda(z, weights, lambda_prev)
}

fn active_sums(z: &[f64], w: &[f64], lambda: f64) -> (f64, f64) {
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for (&zi, &wi) in z.iter().zip(w) {
        if zi - lambda * wi > 0.0 {
            s1 += wi * zi;
            s2 += wi * wi;
        }
    }
    (s1, s2)
}

fn apply_lambda(z: &[f64], w: &[f64], lambda: f64) -> Vec<f64> {
    z.iter()
        .zip(w)
        .map(|(&zi, &wi)| (zi - lambda * wi).max(0.0))
        .collect()
}

/// Nearest point on the curved branch `{x ≥ 0, x₂ ≤ 1, x₁ ≤ x₂²}` by a
/// scan over x₂ plus golden-section refinement.
fn project_demo_curve(x: &[f64]) -> Vec<f64> {
    let dist_sq = |t: f64| {
        let x1 = x[0].clamp(0.0, t * t);
        (x1 - x[0]).powi(2) + (t - x[1]).powi(2)
    };
    let mut best_t = 0.0;
    let mut best = dist_sq(0.0);
    const STEPS: usize = 400;
    for k in 0..=STEPS {
        let t = k as f64 / STEPS as f64;
        let d = dist_sq(t);
        if d < best {
            best = d;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = (
        (best_t - 1.0 / STEPS as f64).max(0.0),
        (best_t + 1.0 / STEPS as f64).min(1.0),
    );
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    for _ in 0..80 {
        let m1 = hi - INV_PHI * (hi - lo);
        let m2 = lo + INV_PHI * (hi - lo);
        if dist_sq(m1) <= dist_sq(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t = 0.5 * (lo + hi);
    vec![x[0].clamp(0.0, t * t), t]
}

// JSON schema. Bounds serialize as numbers, infinities as the strings
// "inf" / "-inf"; the shorthand forms {"type":"free","n":N} and
// {"type":"nonneg","n":N} are accepted on input and normalized to boxes.
#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
enum ConstraintJson {
    Box { lower: Vec<Bound>, upper: Vec<Bound> },
    Simplex { weights: Vec<f64>, cap: f64 },
    NonconvexDemo,
    Free { n: usize },
    Nonneg { n: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Bound {
    Num(f64),
    Word(String),
}

impl Bound {
    fn to_f64(&self) -> Result<f64, String> {
        match self {
            Bound::Num(v) => Ok(*v),
            Bound::Word(w) => match w.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(format!("unrecognized bound '{other}'")),
            },
        }
    }

    fn from_f64(v: f64) -> Bound {
        if v == f64::INFINITY {
            Bound::Word("inf".into())
        } else if v == f64::NEG_INFINITY {
            Bound::Word("-inf".into())
        } else {
            Bound::Num(v)
        }
    }
}

impl Serialize for ConstraintModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let json = match self {
            ConstraintModel::BoxProduct { lower, upper } => ConstraintJson::Box {
                lower: lower.iter().copied().map(Bound::from_f64).collect(),
                upper: upper.iter().copied().map(Bound::from_f64).collect(),
            },
            ConstraintModel::WeightedSimplex { weights, cap } => ConstraintJson::Simplex {
                weights: weights.clone(),
                cap: *cap,
            },
            ConstraintModel::NonconvexDemo => ConstraintJson::NonconvexDemo,
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConstraintModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = ConstraintJson::deserialize(deserializer)?;
        let model = match json {
            ConstraintJson::Box { lower, upper } => {
                let lo: Result<Vec<f64>, String> = lower.iter().map(Bound::to_f64).collect();
                let hi: Result<Vec<f64>, String> = upper.iter().map(Bound::to_f64).collect();
                ConstraintModel::box_product(
                    lo.map_err(DeError::custom)?,
                    hi.map_err(DeError::custom)?,
                )
            }
            ConstraintJson::Simplex { weights, cap } => {
                ConstraintModel::weighted_simplex(weights, cap)
            }
            ConstraintJson::NonconvexDemo => Ok(ConstraintModel::NonconvexDemo),
            ConstraintJson::Free { n } => Ok(ConstraintModel::free(n)),
            ConstraintJson::Nonneg { n } => Ok(ConstraintModel::nonneg(n)),
        };
        model.map_err(|e| DeError::custom(e.to_string()))
    }
}
