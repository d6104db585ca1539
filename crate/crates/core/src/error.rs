use thiserror::Error;

use crate::model::ValidationReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinates")]
    NonFinite,
    #[error("halfspace normal must be nonzero")]
    ZeroNormal,
    #[error("box bounds inverted")]
    InvertedBox,
    #[error("ball radius must be nonnegative")]
    NegativeRadius,
    #[error("polyhedron witness violates its constraints")]
    EmptyPolyhedron,
    #[error("inconsistent cuts: {0}")]
    InconsistentCuts(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("an instance needs at least one (bifunction, set) pair")]
    NoPairs,
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch { what: String, expected: usize, found: usize },
    #[error("non-finite data in {0}")]
    NonFinite(String),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("Lipschitz-type condition fails for bifunction {index}: worst violation {worst:e} with c1={c1}, c2={c2}")]
    LipschitzViolation { index: usize, worst: f64, c1: f64, c2: f64 },
    #[error("known solution rejected for pair {index}: residual {residual:e}")]
    KnownSolutionRejected { index: usize, residual: f64 },
    #[error("feasibility witness lies outside set {index}")]
    NoWitness { index: usize },
    #[error("map {index} is expansive: linear part norm {norm}")]
    ExpansiveMap { index: usize, norm: f64 },
    #[error("maps have no common fixed point")]
    NoCommonFixedPoint,
    #[error("structural condition violated: {0}")]
    Condition(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProxError {
    #[error("step size must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("inner solver stopped after {iterations} iterations with residual {best_residual:e}")]
    NotConverged { iterations: usize, best_residual: f64 },
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid parameters: {0}")]
    InvalidParams(ValidationReport),
    #[error("subproblem {index} at iteration {iteration}: {source}")]
    Prox { iteration: usize, index: usize, source: ProxError },
    #[error("cut projection at iteration {iteration}: {source}")]
    InconsistentCuts { iteration: usize, source: SetError },
    #[error("invariant violated at iteration {iteration}: {detail}")]
    InvariantViolation { iteration: usize, detail: String },
}
