//! Hybrid extragradient-cutting solvers for common solutions of a finite
//! family of pseudomonotone equilibrium problems in R^n.
//!
//! Given bifunctions `f_i` and closed convex sets `K_i`, the solvers look for
//! `x*` in every `K_i` with `f_i(x*, y) ≥ 0` for all `y ∈ K_i`. Each iteration
//! takes an extragradient step per subproblem (two strongly convex prox
//! problems), builds separating halfspaces from the results, and projects the
//! starting point onto their intersection. [`run_parallel`] treats all
//! subproblems per iteration; [`run_cyclic`] one at a time.
//!
//! All types are generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifunctions;
pub mod cuts;
pub mod cyclic;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod model;
pub mod parallel;
pub mod point;
pub mod prox;
pub mod sampling;
pub mod scalar;
pub mod sets;
pub mod trace;

pub use bifunctions::{AffineOperatorBifunction, NashCournotBifunction, ZeroBifunction};
pub use cuts::{
    build_anchor_cut, build_cut, project_two_halfspaces, project_two_halfspaces_traced, Cut, CutPair,
    ProjectionPath,
};
pub use cyclic::{cyclic_index, run_cyclic, run_cyclic_with, step_cyclic, CyclicIteration, CyclicState};
pub use error::{ModelError, ProxError, SetError, SolveError};
pub use instances::{
    make_cfp, make_fixed_point, make_linear_vi, make_nash_cournot, AffineMap, InstanceRecipe,
    LinearViOperator,
};
pub use linalg::Matrix;
pub use model::{
    check_lipschitz_type, validate_params, Bifunction, CsepInstance, ParamViolation, Schedule,
    SolverParams, Subproblem, ValidationReport,
};
pub use parallel::{run_parallel, run_parallel_with, step_parallel, ParallelIteration, ParallelState, RunOutcome};
pub use point::Point;
pub use prox::{prox_optimality_residual, solve_prox, ProxResult};
pub use scalar::Scalar;
pub use sets::{project_halfspace_intersection, ConvexSet, Halfspace};
pub use trace::{InvariantChecks, IterateTrace, IterationRecord, StopReason};

pub type Point64 = Point<f64>;
pub type Matrix64 = Matrix<f64>;
pub type ConvexSet64 = ConvexSet<f64>;
pub type Halfspace64 = Halfspace<f64>;
pub type Cut64 = Cut<f64>;
pub type Instance64 = CsepInstance<f64>;
pub type Params64 = SolverParams<f64>;
pub type Outcome64 = RunOutcome<f64>;
pub type Trace64 = IterateTrace<f64>;
