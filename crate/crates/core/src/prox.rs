//! Strongly convex subproblems `argmin { λ f(x, y) + ½‖anchor − y‖² : y ∈ K }`.

use crate::error::ProxError;
use crate::model::Bifunction;
use crate::point::Point;
use crate::sampling::PointSampler;
use crate::scalar::Scalar;
use crate::sets::ConvexSet;

/// Inner iteration cap for the iterative path.
pub const INNER_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ProxResult<T> {
    pub minimizer: Point<T>,
    /// Projected-gradient residual `‖y − P_K(y − G(y))‖`; zero on the closed-form path.
    pub residual: T,
    pub inner_iters: usize,
    pub used_closed_form: bool,
}

/// Minimises `λ f(x, ·) + ½‖anchor − ·‖²` over `K`.
///
/// The linearization point `x` and the quadratic anchor are separate: the
/// predictor step calls this with `x = anchor = x_n`, the corrector with
/// `x = y_n`, `anchor = x_n`.
///
/// Linearized bifunctions `f(x,y) = ⟨A(x), y − x⟩` take the closed form
/// `P_K(anchor − λ A(x))`. Everything else runs projected gradient with
/// backtracking on the 1-strongly convex objective until the fixed-point
/// residual drops to `tol_inner`.
pub fn solve_prox<T: Scalar>(
    f: &dyn Bifunction<T>,
    x: &Point<T>,
    anchor: &Point<T>,
    lambda: T,
    set: &ConvexSet<T>,
    tol_inner: T,
) -> Result<ProxResult<T>, ProxError> {
    if !(lambda > T::zero()) {
        return Err(ProxError::NonPositiveLambda(lambda.to_f64().unwrap_or(f64::NAN)));
    }
    if f.is_linearized() {
        if let Some(ax) = f.operator(x) {
            let minimizer = set.project(&anchor.add_scaled(-lambda, &ax))?;
            return Ok(ProxResult { minimizer, residual: T::zero(), inner_iters: 0, used_closed_form: true });
        }
    }
    projected_gradient(f, x, anchor, lambda, set, tol_inner)
}

/// Iterative path of [`solve_prox`], also callable for linearized bifunctions.
pub fn projected_gradient<T: Scalar>(
    f: &dyn Bifunction<T>,
    x: &Point<T>,
    anchor: &Point<T>,
    lambda: T,
    set: &ConvexSet<T>,
    tol_inner: T,
) -> Result<ProxResult<T>, ProxError> {
    if !(lambda > T::zero()) {
        return Err(ProxError::NonPositiveLambda(lambda.to_f64().unwrap_or(f64::NAN)));
    }
    let objective = |y: &Point<T>| lambda * f.value(x, y) + T::half() * y.dist_sq(anchor);
    let gradient = |y: &Point<T>| {
        let mut g = f.subgradient(x, y).scale(lambda);
        g.axpy(T::one(), &(y - anchor));
        g
    };
    let roundoff = T::of(8.0) * T::epsilon();

    let mut y = set.project(anchor)?;
    let mut step = T::one();
    let mut best = T::infinity();
    for iter in 0..INNER_MAX_ITER {
        let g = gradient(&y);
        let residual = y.dist(&set.project(&y.add_scaled(-T::one(), &g))?);
        best = best.min(residual);
        if residual <= tol_inner {
            return Ok(ProxResult { minimizer: y, residual, inner_iters: iter, used_closed_form: false });
        }
        let fy = objective(&y);
        let next = loop {
            let cand = set.project(&y.add_scaled(-step, &g))?;
            let d = &cand - &y;
            let model = fy + g.dot(&d) + d.norm_sq() / (T::two() * step);
            if objective(&cand) <= model + roundoff * (fy.abs() + T::one()) || step < T::of(1e-12) {
                break cand;
            }
            step *= T::half();
        };
        y = next;
        step = (step * T::two()).min(T::one());
    }
    Err(ProxError::NotConverged {
        iterations: INNER_MAX_ITER,
        best_residual: best.to_f64().unwrap_or(f64::NAN),
    })
}

/// Predictor and corrector of one extragradient step on subproblem `(f, K)`:
/// `y = prox(f(x_n, ·))`, `z = prox(f(y, ·))`, both anchored at `x_n`.
pub fn extragradient_pair<T: Scalar>(
    f: &dyn Bifunction<T>,
    set: &ConvexSet<T>,
    x_n: &Point<T>,
    lambda: T,
    tol_inner: T,
) -> Result<(Point<T>, Point<T>), ProxError> {
    let y = solve_prox(f, x_n, x_n, lambda, set, tol_inner)?.minimizer;
    let z = solve_prox(f, &y, x_n, lambda, set, tol_inner)?.minimizer;
    Ok((y, z))
}

/// First-order optimality check of a candidate minimizer `y`:
/// `max ⟨y − anchor, y − y'⟩ − λ (f(x, y') − f(x, y))` over sampled `y' ∈ K`.
/// Values `≤ tol` certify optimality on the sample.
pub fn prox_optimality_residual<T, I>(
    f: &dyn Bifunction<T>,
    x: &Point<T>,
    anchor: &Point<T>,
    lambda: T,
    y: &Point<T>,
    samples: I,
) -> T
where
    T: Scalar,
    I: IntoIterator<Item = Point<T>>,
{
    let fy = f.value(x, y);
    let dir = y - anchor;
    samples
        .into_iter()
        .map(|yp| dir.dot(&(y - &yp)) - lambda * (f.value(x, &yp) - fy))
        .fold(T::neg_infinity(), T::max)
}

/// [`prox_optimality_residual`] over `count` seeded points of `set` around `y`.
#[allow(clippy::too_many_arguments)]
pub fn prox_optimality_residual_sampled<T: Scalar>(
    f: &dyn Bifunction<T>,
    x: &Point<T>,
    anchor: &Point<T>,
    lambda: T,
    set: &ConvexSet<T>,
    y: &Point<T>,
    count: usize,
    seed: u64,
) -> T {
    let mut sampler = PointSampler::new(seed);
    let width = T::one() + y.max_abs();
    let samples: Vec<_> = (0..count).map(|_| sampler.point_in_set(set, y, width)).collect();
    prox_optimality_residual(f, x, anchor, lambda, y, samples)
}
