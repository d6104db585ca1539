//! Per-iteration records and the convergence diagnostics.

use std::time::Duration;

use crate::cuts::Cut;
use crate::point::Point;
use crate::scalar::Scalar;

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Iteration budget exhausted.
    MaxIter,
    /// Every separating cut was vacuous (`z_n = x_n` exactly) and the iterate did not move.
    FixedPoint,
    /// Residuals and step below `tol_stop`.
    Converged,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxIter => "max_iter",
            StopReason::FixedPoint => "fixed_point",
            StopReason::Converged => "converged",
        }
    }
}

/// Invariant checks of one iteration, each as a violation amount: values
/// `≤ tol` pass. Checks that need a known solution are `None` without one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantChecks<T> {
    /// `‖z−x*‖² − ‖x−x*‖² + (1−2λc₁)‖y−x‖² + (1−2λc₂)‖z−y‖²`, worst case.
    pub fejer: Option<T>,
    /// Worst `⟨a, x*⟩ − b` over the cuts of the iteration.
    pub containment: Option<T>,
    /// `‖x_n − x0‖ − ‖x_{n+1} − x0‖`.
    pub anchor_monotone: T,
    /// `‖x_n − x0‖ − ‖x* − x0‖`, worst case.
    pub solution_bound: Option<T>,
}

impl<T: Scalar> InvariantChecks<T> {
    /// Largest violation among the checks that ran.
    pub fn worst(&self) -> T {
        [self.fejer, self.containment, Some(self.anchor_monotone), self.solution_bound]
            .into_iter()
            .flatten()
            .fold(T::neg_infinity(), T::max)
    }

    pub fn passes(&self, tol: T) -> bool {
        self.worst() <= tol
    }

    pub fn containment_ok(&self, tol: T) -> Option<bool> {
        self.containment.map(|c| c <= tol)
    }

    /// Name and value of the first failing check.
    pub fn first_failure(&self, tol: T) -> Option<(&'static str, T)> {
        [
            ("fejer", self.fejer),
            ("containment", self.containment),
            ("anchor_monotone", Some(self.anchor_monotone)),
            ("solution_bound", self.solution_bound),
        ]
        .into_iter()
        .find_map(|(name, v)| v.filter(|&v| !(v <= tol)).map(|v| (name, v)))
    }
}

/// One outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T> {
    pub n: usize,
    /// 1-based active subproblem for the cyclic solver.
    pub active_index: Option<usize>,
    pub x: Point<T>,
    /// `‖y_n^i − x_n‖`, in index order.
    pub y_residuals: Vec<T>,
    /// `‖z_n^i − x_n‖`, in index order.
    pub z_residuals: Vec<T>,
    /// `‖x_{n+1} − x_n‖`.
    pub step: T,
    /// `‖x_n − x0‖`.
    pub anchor_dist: T,
    pub checks: InvariantChecks<T>,
    pub wall_time: Duration,
}

impl<T: Scalar> IterationRecord<T> {
    pub fn max_y_residual(&self) -> T {
        self.y_residuals.iter().copied().fold(T::zero(), T::max)
    }

    pub fn max_z_residual(&self) -> T {
        self.z_residuals.iter().copied().fold(T::zero(), T::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateTrace<T> {
    pub records: Vec<IterationRecord<T>>,
}

impl<T: Scalar> Default for IterateTrace<T> {
    fn default() -> Self {
        IterateTrace { records: Vec::new() }
    }
}

impl<T: Scalar> IterateTrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Largest invariant violation over the whole run (`-∞` if nothing was checked).
    pub fn max_violation(&self) -> T {
        self.records.iter().map(|r| r.checks.worst()).fold(T::neg_infinity(), T::max)
    }
}

/// Extragradient pair of one subproblem in one iteration.
pub(crate) struct Evaluated<'a, T> {
    pub lambda: T,
    pub y: &'a Point<T>,
    pub z: &'a Point<T>,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn check_iteration<T: Scalar>(
    x0: &Point<T>,
    x: &Point<T>,
    x_next: &Point<T>,
    pairs: &[Evaluated<'_, T>],
    cuts: &[&Cut<T>],
    known: &[Point<T>],
    c1: T,
    c2: T,
) -> InvariantChecks<T> {
    let anchor_dist = x.dist(x0);
    let anchor_monotone = anchor_dist - x_next.dist(x0);
    if known.is_empty() {
        return InvariantChecks { fejer: None, containment: None, anchor_monotone, solution_bound: None };
    }
    let one = T::one();
    let fejer = known
        .iter()
        .flat_map(|s| {
            pairs.iter().map(move |e| {
                e.z.dist_sq(s) - x.dist_sq(s)
                    + (one - T::two() * e.lambda * c1) * e.y.dist_sq(x)
                    + (one - T::two() * e.lambda * c2) * e.z.dist_sq(e.y)
            })
        })
        .fold(T::neg_infinity(), T::max);
    let containment = known
        .iter()
        .flat_map(|s| cuts.iter().map(move |c| c.violation(s)))
        .fold(T::neg_infinity(), T::max);
    let solution_bound = known.iter().map(|s| anchor_dist - s.dist(x0)).fold(T::neg_infinity(), T::max);
    InvariantChecks {
        fejer: Some(fejer),
        containment: Some(containment),
        anchor_monotone,
        solution_bound: Some(solution_bound),
    }
}
