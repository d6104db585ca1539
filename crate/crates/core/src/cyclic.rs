//! Cyclic hybrid extragradient-cutting method: one subproblem per iteration
//! in the order `1, 2, …, N, 1, …`, with the explicit two-cut projection.

use std::time::Instant;

use crate::cuts::{default_cut_tol, project_two_halfspaces, CutPair};
use crate::error::SolveError;
use crate::model::{gamma_violation, lambda_violation, validate_params, CsepInstance, SolverParams, ValidationReport};
use crate::parallel::RunOutcome;
use crate::point::Point;
use crate::prox::extragradient_pair;
use crate::scalar::Scalar;
use crate::trace::{check_iteration, Evaluated, IterateTrace, IterationRecord, StopReason};

/// `n mod N + 1`, the 1-based subproblem handled at iteration `n`.
pub fn cyclic_index(n: usize, count: usize) -> Option<usize> {
    (count > 0).then(|| n % count + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicIteration<T> {
    pub n: usize,
    /// 1-based.
    pub active_index: usize,
    pub x: Point<T>,
    pub lambda: T,
    pub gamma: T,
    pub y: Point<T>,
    pub z: Point<T>,
    pub cut_pair: CutPair<T>,
    pub x_next: Point<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicState<T> {
    pub n: usize,
    pub x: Point<T>,
    pub last: Option<CyclicIteration<T>>,
    /// Consecutive iterations with `‖z_n − x_n‖ ≤ tol_stop`.
    pub small_residual_streak: usize,
    pub stopped: Option<StopReason>,
}

impl<T: Scalar> CyclicState<T> {
    pub fn start(x0: &Point<T>) -> Self {
        CyclicState { n: 0, x: x0.clone(), last: None, small_residual_streak: 0, stopped: None }
    }

    /// 1-based index the next step will use.
    pub fn active_index(&self, count: usize) -> usize {
        cyclic_index(self.n, count).expect("instance has at least one subproblem")
    }
}

fn step_record<T: Scalar>(
    state: &CyclicState<T>,
    instance: &CsepInstance<T>,
    params: &SolverParams<T>,
) -> Result<(CyclicState<T>, IterationRecord<T>), SolveError> {
    let started = Instant::now();
    let n = state.n;
    let x = &state.x;
    let count = instance.len();
    let active_index = state.active_index(count);
    let pair = &instance.pairs()[active_index - 1];

    // step sizes are keyed by the iteration counter alone
    let violations: Vec<_> = lambda_violation(params, n, 0).into_iter().chain(gamma_violation(params, n, 0)).collect();
    if !violations.is_empty() {
        return Err(SolveError::InvalidParams(ValidationReport { violations, schedules_enumerated: false }));
    }
    let (lambda, gamma) = (params.lambda.at(n, 0), params.gamma.at(n, 0));

    let (y, z) = extragradient_pair(pair.bifunction.as_ref(), &pair.set, x, lambda, params.tol_inner)
        .map_err(|source| SolveError::Prox { iteration: n, index: active_index, source })?;
    let cut_pair = CutPair::new(&params.x0, x, &z, gamma);
    let x_next = project_two_halfspaces(&params.x0, &cut_pair.h, &cut_pair.w, default_cut_tol())
        .map_err(|source| SolveError::InconsistentCuts { iteration: n, source })?;

    let checks = check_iteration(
        &params.x0,
        x,
        &x_next,
        &[Evaluated { lambda, y: &y, z: &z }],
        &[&cut_pair.h, &cut_pair.w],
        instance.known_solutions(),
        instance.c1(),
        instance.c2(),
    );
    let step = x_next.dist(x);
    let z_res = z.dist(x);
    let record = IterationRecord {
        n,
        active_index: Some(active_index),
        x: x.clone(),
        y_residuals: vec![y.dist(x)],
        z_residuals: vec![z_res],
        step,
        anchor_dist: x.dist(&params.x0),
        checks,
        wall_time: started.elapsed(),
    };
    if params.abort_on_violation {
        if let Some((name, v)) = checks.first_failure(params.invariant_tol) {
            return Err(SolveError::InvariantViolation { iteration: n, detail: format!("{name} violation {v:e}") });
        }
    }

    let streak = if z_res <= params.tol_stop { state.small_residual_streak + 1 } else { 0 };
    let stopped = (streak >= count && step <= params.tol_stop).then_some(StopReason::Converged);
    let iteration = CyclicIteration { n, active_index, x: x.clone(), lambda, gamma, y, z, cut_pair, x_next: x_next.clone() };
    Ok((
        CyclicState { n: n + 1, x: x_next, last: Some(iteration), small_residual_streak: streak, stopped },
        record,
    ))
}

/// One cyclic iteration on subproblem `[n]`.
pub fn step_cyclic<T: Scalar>(
    state: &CyclicState<T>,
    instance: &CsepInstance<T>,
    params: &SolverParams<T>,
) -> Result<CyclicState<T>, SolveError> {
    step_record(state, instance, params).map(|(s, _)| s)
}

/// Iterates [`step_cyclic`]. Stops once `‖z_n − x_n‖ ≤ tol_stop` has held for
/// `N` consecutive iterations (a full sweep) and `‖x_{n+1} − x_n‖ ≤ tol_stop`,
/// or after `max_iter` iterations. A single-index fixed point never stops the run.
pub fn run_cyclic<T: Scalar>(instance: &CsepInstance<T>, params: &SolverParams<T>) -> Result<RunOutcome<T>, SolveError> {
    let mut records = Vec::new();
    let outcome = run_cyclic_with(instance, params, |r| records.push(r))?;
    Ok(RunOutcome { trace: IterateTrace { records }, ..outcome })
}

/// [`run_cyclic`] handing each record to `observe` instead of keeping it;
/// the returned trace is empty.
pub fn run_cyclic_with<T: Scalar>(
    instance: &CsepInstance<T>,
    params: &SolverParams<T>,
    mut observe: impl FnMut(IterationRecord<T>),
) -> Result<RunOutcome<T>, SolveError> {
    validate_params(params, instance).into_result()?;
    let mut state = CyclicState::start(&params.x0);
    while state.stopped.is_none() && state.n < params.max_iter {
        let (next, record) = step_record(&state, instance, params)?;
        observe(record);
        state = next;
    }
    Ok(RunOutcome {
        final_point: state.x,
        iterations: state.n,
        stop: state.stopped.unwrap_or(StopReason::MaxIter),
        trace: IterateTrace::default(),
    })
}
