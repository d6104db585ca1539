//! Parallel hybrid extragradient-cutting method: all subproblems per
//! iteration, then projection of `x0` onto the intersection of every cut.

use std::time::Instant;

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::cuts::{build_anchor_cut, build_cut, default_cut_tol, project_two_halfspaces, Cut};
use crate::error::SolveError;
use crate::model::{gamma_violation, lambda_violation, validate_params, CsepInstance, SolverParams, ValidationReport};
use crate::point::Point;
use crate::prox::extragradient_pair;
use crate::scalar::Scalar;
use crate::sets::project_halfspace_intersection;
use crate::trace::{check_iteration, Evaluated, IterateTrace, IterationRecord, StopReason};

/// Everything computed in one parallel iteration from `x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelIteration<T> {
    pub n: usize,
    pub x: Point<T>,
    pub lambdas: Vec<T>,
    pub gammas: Vec<T>,
    pub ys: Vec<Point<T>>,
    pub zs: Vec<Point<T>>,
    /// `H_n^i`, in index order.
    pub cuts: Vec<Cut<T>>,
    /// `W_n`.
    pub anchor_cut: Cut<T>,
    pub x_next: Point<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelState<T> {
    /// Completed iterations; `x` is `x_n` for this `n`.
    pub n: usize,
    pub x: Point<T>,
    pub last: Option<ParallelIteration<T>>,
    pub stopped: Option<StopReason>,
}

impl<T: Scalar> ParallelState<T> {
    pub fn start(x0: &Point<T>) -> Self {
        ParallelState { n: 0, x: x0.clone(), last: None, stopped: None }
    }
}

/// Result of a full solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome<T> {
    pub final_point: Point<T>,
    pub iterations: usize,
    pub stop: StopReason,
    pub trace: IterateTrace<T>,
}

fn schedule_values<T: Scalar>(params: &SolverParams<T>, n: usize, count: usize) -> Result<(Vec<T>, Vec<T>), SolveError> {
    let mut violations = Vec::new();
    for i in 0..count {
        violations.extend(lambda_violation(params, n, i));
        violations.extend(gamma_violation(params, n, i));
    }
    if !violations.is_empty() {
        return Err(SolveError::InvalidParams(ValidationReport { violations, schedules_enumerated: false }));
    }
    Ok(((0..count).map(|i| params.lambda.at(n, i)).collect(), (0..count).map(|i| params.gamma.at(n, i)).collect()))
}

/// One iteration from `state.x`. The N prox pairs run on the rayon pool when
/// `pool` is given (or the global pool when `params.workers == 0`); results
/// are gathered in index order, so the output does not depend on scheduling.
fn step_in<T: Scalar>(
    state: &ParallelState<T>,
    instance: &CsepInstance<T>,
    params: &SolverParams<T>,
    pool: Option<&ThreadPool>,
) -> Result<(ParallelState<T>, IterationRecord<T>), SolveError> {
    let started = Instant::now();
    let n = state.n;
    let x = &state.x;
    let pairs = instance.pairs();
    let (lambdas, gammas) = schedule_values(params, n, pairs.len())?;

    let solve = |i: usize| {
        let p = &pairs[i];
        extragradient_pair(p.bifunction.as_ref(), &p.set, x, lambdas[i], params.tol_inner)
            .map_err(|source| SolveError::Prox { iteration: n, index: i + 1, source })
    };
    let results: Vec<_> = if pairs.len() == 1 {
        vec![solve(0)]
    } else if let Some(pool) = pool {
        pool.install(|| (0..pairs.len()).into_par_iter().map(solve).collect())
    } else {
        (0..pairs.len()).into_par_iter().map(solve).collect()
    };
    let (ys, zs): (Vec<_>, Vec<_>) = results.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().unzip();

    let cuts: Vec<Cut<T>> = zs.iter().zip(&gammas).map(|(z, &g)| build_cut(x, z, g)).collect();
    let anchor_cut = build_anchor_cut(&params.x0, x);
    // a single subproblem gives the same two-cut projection as the cyclic method
    let x_next = if let [h] = cuts.as_slice() {
        project_two_halfspaces(&params.x0, h, &anchor_cut, default_cut_tol())
    } else {
        let active: Vec<_> = cuts.iter().chain(std::iter::once(&anchor_cut)).filter_map(|c| c.halfspace().cloned()).collect();
        project_halfspace_intersection(&active, &params.x0, default_cut_tol())
    }
    .map_err(|source| SolveError::InconsistentCuts { iteration: n, source })?;

    let evaluated: Vec<_> =
        ys.iter().zip(&zs).zip(&lambdas).map(|((y, z), &lambda)| Evaluated { lambda, y, z }).collect();
    let cut_refs: Vec<&Cut<T>> = cuts.iter().chain(std::iter::once(&anchor_cut)).collect();
    let checks = check_iteration(
        &params.x0,
        x,
        &x_next,
        &evaluated,
        &cut_refs,
        instance.known_solutions(),
        instance.c1(),
        instance.c2(),
    );
    let step = x_next.dist(x);
    let z_residuals: Vec<T> = zs.iter().map(|z| z.dist(x)).collect();
    let max_z = z_residuals.iter().copied().fold(T::zero(), T::max);
    let record = IterationRecord {
        n,
        active_index: None,
        x: x.clone(),
        y_residuals: ys.iter().map(|y| y.dist(x)).collect(),
        z_residuals,
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

    let stopped = if cuts.iter().all(Cut::is_whole_space) && step <= params.tol_stop {
        Some(StopReason::FixedPoint)
    } else if step <= params.tol_stop && max_z <= params.tol_stop {
        Some(StopReason::Converged)
    } else {
        None
    };
    let iteration = ParallelIteration { n, x: x.clone(), lambdas, gammas, ys, zs, cuts, anchor_cut, x_next: x_next.clone() };
    let next = ParallelState { n: n + 1, x: x_next, last: Some(iteration), stopped };
    Ok((next, record))
}

fn build_pool(workers: usize) -> Option<ThreadPool> {
    (workers > 0).then(|| {
        rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("failed to build worker pool")
    })
}

/// Steps 1–3 of one parallel iteration: predictor/corrector per subproblem,
/// the cuts `H_n^i`, `W_n`, and `x_{n+1} = P_{∩H_n^i ∩ W_n}(x0)`.
pub fn step_parallel<T: Scalar>(
    state: &ParallelState<T>,
    instance: &CsepInstance<T>,
    params: &SolverParams<T>,
) -> Result<ParallelState<T>, SolveError> {
    let pool = build_pool(params.workers);
    step_in(state, instance, params, pool.as_ref()).map(|(s, _)| s)
}

/// Iterates [`step_parallel`] until `‖x_{n+1} − x_n‖ ≤ tol_stop` and
/// `max_i ‖z_n^i − x_n‖ ≤ tol_stop`, or `max_iter` iterations.
pub fn run_parallel<T: Scalar>(instance: &CsepInstance<T>, params: &SolverParams<T>) -> Result<RunOutcome<T>, SolveError> {
    let mut records = Vec::new();
    let outcome = run_parallel_with(instance, params, |r| records.push(r))?;
    Ok(RunOutcome { trace: IterateTrace { records }, ..outcome })
}

/// [`run_parallel`] handing each record to `observe` instead of keeping it;
/// the returned trace is empty.
pub fn run_parallel_with<T: Scalar>(
    instance: &CsepInstance<T>,
    params: &SolverParams<T>,
    mut observe: impl FnMut(IterationRecord<T>),
) -> Result<RunOutcome<T>, SolveError> {
    validate_params(params, instance).into_result()?;
    let pool = build_pool(params.workers);
    let mut state = ParallelState::start(&params.x0);
    while state.stopped.is_none() && state.n < params.max_iter {
        let (next, record) = step_in(&state, instance, params, pool.as_ref())?;
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
