//! Maximization of k-submodular functions under a knapsack constraint.
//!
//! A point of the search space is an [`Orthant`]: every element of an
//! ordered ground set is either unassigned or placed in one of `k`
//! subsets. Given integer element costs and a budget, [`solve`] runs a
//! partial-enumeration greedy with approximation guarantee
//! `(1 - e^-2)/2 ≈ 0.432` for monotone and `(1 - e^-3)/3 ≈ 0.317` for
//! non-monotone objectives. [`exact`] provides brute-force ground truth,
//! [`verify()`] checks k-submodularity and monotonicity of a function, and
//! [`proofcheck`] re-runs the analysis of the greedy as executable checks.
//!
//! Function values are generic over [`Scalar`]: `f64`, `f32` or the exact
//! [`Rational`].

// `!(v >= 0)` is deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exact;
pub mod function;
pub mod generate;
pub mod instance;
pub mod oracle;
pub mod orthant;
pub mod proofcheck;
pub mod scalar;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{brute_force_opt, brute_force_opt_with_cap, OptResult};
pub use function::{Contraction, Coverage, FunctionSpec, KFunction, SignedCoverage, Table, UniverseItem};
pub use instance::Instance;
pub use oracle::Oracle;
pub use orthant::{CostVector, Orthant};
pub use scalar::{Rational, Scalar};
pub use solver::{solve, Monotonicity, SolveReport, SolverConfig};
pub use verify::{verify, Verdict, VerificationReport, Verifier, VerifyMode, Witness};

pub type InstanceF64 = Instance<f64>;
pub type InstanceF32 = Instance<f32>;
pub type InstanceRational = Instance<Rational>;

pub type FunctionSpecF64 = FunctionSpec<f64>;
pub type FunctionSpecRational = FunctionSpec<Rational>;

pub type SolveReportF64 = SolveReport<f64>;
pub type SolveReportRational = SolveReport<Rational>;

pub type VerificationReportF64 = VerificationReport<f64>;
