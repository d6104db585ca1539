//! Instances, solver parameters and the standing-assumption checks.

use std::fmt;
use std::sync::Arc;

use crate::error::ModelError;
use crate::point::Point;
use crate::sampling::PointSampler;
use crate::scalar::Scalar;
use crate::sets::{project_halfspace_intersection, ConvexSet};

/// Equilibrium bifunction `f(x, y)`, convex in `y`, with Lipschitz-type
/// constants `c1`, `c2`:
///
/// ```text
/// f(x,y) + f(y,z) >= f(x,z) - c1 |x-y|^2 - c2 |y-z|^2
/// ```
///
/// Implementations must be pure; the parallel solver calls them from several
/// threads at once.
pub trait Bifunction<T: Scalar>: fmt::Debug + Send + Sync {
    fn value(&self, x: &Point<T>, y: &Point<T>) -> T;

    /// An element of the subdifferential of `f(x, ·)` at `y`.
    fn subgradient(&self, x: &Point<T>, y: &Point<T>) -> Point<T>;

    fn c1(&self) -> T;

    fn c2(&self) -> T;

    /// `A(x)` when `f(x, y) = ⟨A(x), y − x⟩`; enables the closed-form prox.
    fn operator(&self, _x: &Point<T>) -> Option<Point<T>> {
        None
    }

    fn is_linearized(&self) -> bool {
        false
    }

    /// Dimension the oracle is bound to, if any.
    fn dim(&self) -> Option<usize> {
        None
    }
}

/// One equilibrium subproblem: bifunction `f_i` on constraint set `K_i`.
#[derive(Debug, Clone)]
pub struct Subproblem<T> {
    pub bifunction: Arc<dyn Bifunction<T>>,
    pub set: ConvexSet<T>,
}

impl<T: Scalar> Subproblem<T> {
    pub fn new(bifunction: impl Bifunction<T> + 'static, set: ConvexSet<T>) -> Self {
        Subproblem { bifunction: Arc::new(bifunction), set }
    }
}

/// Common-solution equilibrium problem: find `x*` in every `K_i` with
/// `f_i(x*, y) ≥ 0` for all `y ∈ K_i`.
#[derive(Debug, Clone)]
pub struct CsepInstance<T> {
    dimension: usize,
    pairs: Vec<Subproblem<T>>,
    known_solutions: Vec<Point<T>>,
}

/// Tolerance for certifying a known solution by sampling.
pub const KNOWN_SOLUTION_TOL: f64 = 1e-8;

impl<T: Scalar> CsepInstance<T> {
    pub fn new(dimension: usize, pairs: Vec<Subproblem<T>>) -> Result<Self, ModelError> {
        if pairs.is_empty() {
            return Err(ModelError::NoPairs);
        }
        for (i, p) in pairs.iter().enumerate() {
            for (what, d) in [("set", p.set.dim()), ("bifunction", p.bifunction.dim())] {
                if let Some(d) = d.filter(|&d| d != dimension) {
                    return Err(ModelError::DimensionMismatch {
                        what: format!("{what} {i}"),
                        expected: dimension,
                        found: d,
                    });
                }
            }
            if !p.bifunction.c1().is_finite()
                || !p.bifunction.c2().is_finite()
                || p.bifunction.c1() < T::zero()
                || p.bifunction.c2() < T::zero()
            {
                return Err(ModelError::NonFinite(format!("Lipschitz constants of bifunction {i}")));
            }
        }
        Ok(CsepInstance { dimension, pairs, known_solutions: Vec::new() })
    }

    /// Attaches a known element of the solution set after certifying it by
    /// sampling: `x*` must lie in every `K_i` and `f_i(x*, y) ≥ −1e-8` on
    /// `samples` points of each `K_i`.
    pub fn with_known_solution(
        mut self,
        solution: Point<T>,
        seed: u64,
        samples: usize,
    ) -> Result<Self, ModelError> {
        if solution.dim() != self.dimension {
            return Err(ModelError::DimensionMismatch {
                what: "known solution".into(),
                expected: self.dimension,
                found: solution.dim(),
            });
        }
        if !solution.is_finite() {
            return Err(ModelError::NonFinite("known solution".into()));
        }
        let residuals = self.solution_residuals(&solution, seed, samples);
        let tol = T::of(KNOWN_SOLUTION_TOL);
        for (index, &r) in residuals.iter().enumerate() {
            if !(r >= -tol) {
                return Err(ModelError::KnownSolutionRejected {
                    index,
                    residual: r.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        self.known_solutions.push(solution);
        Ok(self)
    }

    /// Per subproblem, `min f_i(x, y)` over sampled `y ∈ K_i` (and `y = P_{K_i}(x)`),
    /// or `-∞` when `x ∉ K_i`. Nonnegative values certify `x` on the sample.
    pub fn solution_residuals(&self, x: &Point<T>, seed: u64, samples: usize) -> Vec<T> {
        let mut sampler = PointSampler::new(seed);
        let width = T::of(2.0) * (T::one() + x.max_abs());
        self.pairs
            .iter()
            .map(|p| {
                if !p.set.contains(x, T::of(KNOWN_SOLUTION_TOL)) {
                    return T::neg_infinity();
                }
                let f = &p.bifunction;
                (0..samples)
                    .map(|_| sampler.point_in_set(&p.set, x, width))
                    .map(|y| f.value(x, &y))
                    .fold(T::infinity(), T::min)
            })
            .collect()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[Subproblem<T>] {
        &self.pairs
    }

    pub fn known_solutions(&self) -> &[Point<T>] {
        &self.known_solutions
    }

    /// Family-wide `max_i c1(f_i)`.
    pub fn c1(&self) -> T {
        self.pairs.iter().map(|p| p.bifunction.c1()).fold(T::zero(), T::max)
    }

    /// Family-wide `max_i c2(f_i)`.
    pub fn c2(&self) -> T {
        self.pairs.iter().map(|p| p.bifunction.c2()).fold(T::zero(), T::max)
    }

    /// `min{1/(2c1), 1/(2c2)}`, infinite when both constants vanish.
    pub fn step_bound(&self) -> T {
        step_bound(self.c1()).min(step_bound(self.c2()))
    }

    pub fn feasible_region_is_polyhedral(&self) -> bool {
        self.pairs.iter().all(|p| p.set.is_polyhedral())
    }

    /// Exact projection onto `K = ∩ K_i` when every set is polyhedral. For
    /// feasibility instances (all `f_i ≡ 0`) this is `P_F`.
    pub fn project_onto_common_set(&self, x: &Point<T>) -> Option<Result<Point<T>, ModelError>> {
        let mut cuts = Vec::new();
        for p in &self.pairs {
            cuts.extend(p.set.as_halfspaces()?);
        }
        Some(project_halfspace_intersection(&cuts, x, T::of(1e-13)).map_err(ModelError::from))
    }
}

fn step_bound<T: Scalar>(c: T) -> T {
    if c > T::zero() {
        T::one() / (T::two() * c)
    } else {
        T::infinity()
    }
}

/// Step-size or relaxation schedule indexed by `(iteration, subproblem)`.
#[derive(Clone)]
pub enum Schedule<T> {
    Constant(T),
    Custom(Arc<dyn Fn(usize, usize) -> T + Send + Sync>),
}

impl<T: Scalar> Schedule<T> {
    pub fn custom(f: impl Fn(usize, usize) -> T + Send + Sync + 'static) -> Self {
        Schedule::Custom(Arc::new(f))
    }

    pub fn at(&self, k: usize, i: usize) -> T {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::Custom(f) => f(k, i),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Schedule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Schedule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Parameters shared by the parallel and cyclic solvers.
#[derive(Debug, Clone)]
pub struct SolverParams<T> {
    /// `λ_k^i`; must stay in `[lambda_lo, lambda_hi]`.
    pub lambda: Schedule<T>,
    /// `γ_k^i`; must stay in `[epsilon, 1/2]`.
    pub gamma: Schedule<T>,
    pub lambda_lo: T,
    pub lambda_hi: T,
    pub epsilon: T,
    pub x0: Point<T>,
    pub max_iter: usize,
    pub tol_stop: T,
    pub tol_inner: T,
    /// Slack allowed in the per-iteration invariant checks.
    pub invariant_tol: T,
    /// Stop with [`crate::SolveError::InvariantViolation`] on the first failed check.
    pub abort_on_violation: bool,
    /// Worker threads for the parallel solver; `0` uses the global pool.
    pub workers: usize,
}

impl<T: Scalar> SolverParams<T> {
    /// Defaults: `λ_k^i ≡ (λ+μ)/2`, `γ_k^i ≡ 1/2`, `ε = 1/4`; tolerances
    /// `1e-9` and `1e-10`, floored at a few machine epsilons for `f32`.
    pub fn new(x0: Point<T>, lambda_lo: T, lambda_hi: T) -> Self {
        SolverParams {
            lambda: Schedule::Constant((lambda_lo + lambda_hi) * T::half()),
            gamma: Schedule::Constant(T::half()),
            lambda_lo,
            lambda_hi,
            epsilon: T::of(0.25),
            x0,
            max_iter: 10_000,
            tol_stop: T::of(1e-9).max(T::of(16.0) * T::epsilon()),
            tol_inner: T::of(1e-10).max(T::of(128.0) * T::epsilon()),
            invariant_tol: T::of(1e-8),
            abort_on_violation: false,
            workers: 0,
        }
    }

    /// Constant step `λ_k^i ≡ lambda` (so `λ = μ = lambda`).
    pub fn with_constant_lambda(mut self, lambda: T) -> Self {
        self.lambda = Schedule::Constant(lambda);
        self.lambda_lo = lambda;
        self.lambda_hi = lambda;
        self
    }

    /// Constant relaxation `γ_k^i ≡ gamma`; lowers `ε` to `gamma` if needed.
    pub fn with_constant_gamma(mut self, gamma: T) -> Self {
        self.gamma = Schedule::Constant(gamma);
        if gamma < self.epsilon && gamma > T::zero() {
            self.epsilon = gamma;
        }
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol_stop(mut self, tol: T) -> Self {
        self.tol_stop = tol;
        self
    }

    pub fn with_tol_inner(mut self, tol: T) -> Self {
        self.tol_inner = tol;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_abort_on_violation(mut self, abort: bool) -> Self {
        self.abort_on_violation = abort;
        self
    }
}

/// A single violated parameter bound.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamViolation {
    LambdaLoNotPositive { lambda_lo: f64 },
    LambdaEnvelopeInverted { lambda_lo: f64, lambda_hi: f64 },
    LambdaHiNotFinite,
    StepAboveC1Bound { mu: f64, bound: f64 },
    StepAboveC2Bound { mu: f64, bound: f64 },
    EpsilonOutOfRange { epsilon: f64 },
    LambdaOutsideEnvelope { k: usize, i: usize, value: f64 },
    GammaOutOfRange { k: usize, i: usize, value: f64 },
    X0Dimension { expected: usize, found: usize },
    X0NonFinite,
    NonPositiveTolerance { name: &'static str },
    ZeroMaxIter,
}

impl fmt::Display for ParamViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParamViolation::*;
        match self {
            LambdaLoNotPositive { lambda_lo } => write!(f, "λ must be positive (λ = {lambda_lo})"),
            LambdaEnvelopeInverted { lambda_lo, lambda_hi } => {
                write!(f, "λ = {lambda_lo} exceeds μ = {lambda_hi}")
            }
            LambdaHiNotFinite => write!(f, "μ must be finite"),
            StepAboveC1Bound { mu, bound } => write!(f, "λ ≥ 1/(2c₁): μ = {mu}, 1/(2c₁) = {bound}"),
            StepAboveC2Bound { mu, bound } => write!(f, "λ ≥ 1/(2c₂): μ = {mu}, 1/(2c₂) = {bound}"),
            EpsilonOutOfRange { epsilon } => write!(f, "ε = {epsilon} outside (0, 1/2]"),
            LambdaOutsideEnvelope { k, i, value } => {
                write!(f, "λ_{k}^{i} = {value} outside [λ, μ]")
            }
            GammaOutOfRange { k, i, value } => write!(f, "γ_{k}^{i} = {value} outside [ε, 1/2]"),
            X0Dimension { expected, found } => {
                write!(f, "x0 has dimension {found}, instance has {expected}")
            }
            X0NonFinite => write!(f, "x0 has non-finite coordinates"),
            NonPositiveTolerance { name } => write!(f, "{name} must be positive"),
            ZeroMaxIter => write!(f, "max_iter must be positive"),
        }
    }
}

/// Outcome of [`validate_params`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<ParamViolation>,
    /// Whether every `(k, i)` up to `max_iter` was enumerated.
    pub schedules_enumerated: bool,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<(), crate::SolveError> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(crate::SolveError::InvalidParams(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Schedules are enumerated up to this many `(k, i)` evaluations; beyond it
/// only the declared envelope is checked up front and the solvers re-check
/// every value they use.
pub const SCHEDULE_ENUMERATION_CAP: usize = 1_000_000;
const MAX_REPORTED: usize = 16;

/// Checks the step-size, relaxation and tolerance requirements against the
/// family-wide constants `max c1`, `max c2` of `instance`.
pub fn validate_params<T: Scalar>(params: &SolverParams<T>, instance: &CsepInstance<T>) -> ValidationReport {
    let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
    let mut out = Vec::new();
    let (lo, hi) = (params.lambda_lo, params.lambda_hi);
    if !(lo > T::zero()) {
        out.push(ParamViolation::LambdaLoNotPositive { lambda_lo: f(lo) });
    }
    if lo > hi {
        out.push(ParamViolation::LambdaEnvelopeInverted { lambda_lo: f(lo), lambda_hi: f(hi) });
    }
    if !hi.is_finite() {
        out.push(ParamViolation::LambdaHiNotFinite);
    }
    let (b1, b2) = (step_bound(instance.c1()), step_bound(instance.c2()));
    if !(hi < b1) {
        out.push(ParamViolation::StepAboveC1Bound { mu: f(hi), bound: f(b1) });
    }
    if !(hi < b2) {
        out.push(ParamViolation::StepAboveC2Bound { mu: f(hi), bound: f(b2) });
    }
    let eps = params.epsilon;
    if !(eps > T::zero() && eps <= T::half()) {
        out.push(ParamViolation::EpsilonOutOfRange { epsilon: f(eps) });
    }
    if params.x0.dim() != instance.dimension() {
        out.push(ParamViolation::X0Dimension { expected: instance.dimension(), found: params.x0.dim() });
    } else if !params.x0.is_finite() {
        out.push(ParamViolation::X0NonFinite);
    }
    for (name, v) in [
        ("tol_stop", params.tol_stop),
        ("tol_inner", params.tol_inner),
        ("invariant_tol", params.invariant_tol),
    ] {
        if !(v > T::zero()) {
            out.push(ParamViolation::NonPositiveTolerance { name });
        }
    }
    if params.max_iter == 0 {
        out.push(ParamViolation::ZeroMaxIter);
    }

    let n = instance.len();
    let total = params.max_iter.saturating_mul(n);
    let enumerate = total <= SCHEDULE_ENUMERATION_CAP;
    let mut schedule_violations = Vec::new();
    let mut check = |k: usize, i: usize| {
        if schedule_violations.len() >= MAX_REPORTED {
            return;
        }
        if let Some(v) = lambda_violation(params, k, i) {
            schedule_violations.push(v);
        }
        if let Some(v) = gamma_violation(params, k, i) {
            schedule_violations.push(v);
        }
    };
    match (&params.lambda, &params.gamma, enumerate) {
        (Schedule::Constant(_), Schedule::Constant(_), _) | (_, _, false) => check(0, 0),
        _ => {
            for k in 0..params.max_iter {
                for i in 0..n {
                    check(k, i);
                }
            }
        }
    }
    out.extend(schedule_violations);
    ValidationReport { violations: out, schedules_enumerated: enumerate }
}

pub(crate) fn lambda_violation<T: Scalar>(p: &SolverParams<T>, k: usize, i: usize) -> Option<ParamViolation> {
    let v = p.lambda.at(k, i);
    (!(v >= p.lambda_lo && v <= p.lambda_hi)).then(|| ParamViolation::LambdaOutsideEnvelope {
        k,
        i,
        value: v.to_f64().unwrap_or(f64::NAN),
    })
}

pub(crate) fn gamma_violation<T: Scalar>(p: &SolverParams<T>, k: usize, i: usize) -> Option<ParamViolation> {
    let v = p.gamma.at(k, i);
    (!(v >= p.epsilon && v <= T::half())).then(|| ParamViolation::GammaOutOfRange {
        k,
        i,
        value: v.to_f64().unwrap_or(f64::NAN),
    })
}

/// Worst sampled violation of the Lipschitz-type condition,
/// `max f(x,z) − f(x,y) − f(y,z) − c1‖x−y‖² − c2‖y−z‖²`. A positive value
/// certifies that the declared constants are invalid. Returns `-∞` for an
/// empty sample.
pub fn check_lipschitz_type<T, I>(f: &dyn Bifunction<T>, triples: I) -> T
where
    T: Scalar,
    I: IntoIterator<Item = (Point<T>, Point<T>, Point<T>)>,
{
    let (c1, c2) = (f.c1(), f.c2());
    triples
        .into_iter()
        .map(|(x, y, z)| {
            f.value(&x, &z) - f.value(&x, &y) - f.value(&y, &z) - c1 * x.dist_sq(&y) - c2 * y.dist_sq(&z)
        })
        .fold(T::neg_infinity(), T::max)
}

/// [`check_lipschitz_type`] over `count` seeded triples in `[-half_width, half_width]^dim`.
pub fn check_lipschitz_type_sampled<T: Scalar>(
    f: &dyn Bifunction<T>,
    dim: usize,
    half_width: T,
    count: usize,
    seed: u64,
) -> T {
    let mut sampler = PointSampler::new(seed);
    check_lipschitz_type(f, sampler.triples(dim, half_width, count))
}

/// Tolerance for the build-time Lipschitz-type certificate.
pub const LIPSCHITZ_CHECK_TOL: f64 = 1e-10;
