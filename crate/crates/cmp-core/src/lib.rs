//! Constrained matching pursuit over coordinate-product feasible sets.
//!
//! The library has three layers:
//!
//! * numeric kernels: dense column-major matrices, Householder least squares,
//!   a Jacobi eigensolver, Schur complements ([`linalg`]), and the restricted
//!   solvers used by the pursuit refit step ([`solver`]);
//! * the pursuit itself: per-coordinate interval minimizers, greedy index
//!   selection, full traces, and exhaustive tie-branch enumeration
//!   ([`pursuit`]), plus brute-force reference oracles ([`oracle`]);
//! * certification: linear-inequality alternatives ([`lp`]), fixed-support
//!   recovery conditions, sparsity-class constants, and the packaged
//!   four-column unit-norm fixture with its full verification suite
//!   ([`certify`], [`fixtures`]).
//!
//! Every tolerance is centralized in [`policy::NumericPolicy`] and passed
//! explicitly; nothing reads hidden global state except the documented
//! `CMP_NUM_POLICY` environment toggle.

pub mod constraint;
pub mod fixtures;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod policy;
pub mod pursuit;
pub mod solver;

pub mod certify;

pub use constraint::{ConstraintModel, ExtendedInterval};
pub use linalg::{GramCache, MeasurementMatrix};
pub use policy::NumericPolicy;
