//! Batch front end for the `ceqp` solvers: instance files, traces and exit codes.

mod output;
mod schema;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use ceqp::{run_cyclic_with, run_parallel_with, Point, SolveError, SolverParams, StopReason};

pub use output::{Summary, TraceFormat, TraceRow, TraceWriter, CSV_HEADER};
pub use schema::{load_instance, BifunctionSpec, CutSpec, InstanceFile, LoadError, LoadedInstance, SetSpec};

pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const MAX_ITER: i32 = 2;
    pub const INCONSISTENT_CUTS: i32 = 3;
    pub const PROX_FAILURE: i32 = 4;
    pub const INVARIANT_VIOLATION: i32 = 5;
}

/// Samples per subproblem for the final-point residuals in the summary.
const SUMMARY_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algo {
    Parallel,
    Cyclic,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Parallel => "parallel",
            Algo::Cyclic => "cyclic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub instance_path: PathBuf,
    pub algo: Algo,
    /// Constant step size; falls back to the file, then to half the step bound.
    pub lambda: Option<f64>,
    pub gamma: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub tol_inner: f64,
    pub trace_path: Option<PathBuf>,
    pub trace_format: TraceFormat,
    pub check_invariants: bool,
    pub seed: u64,
    pub workers: usize,
    /// Overrides the file's starting point.
    pub x0: Option<Vec<f64>>,
    pub record_wall_time: bool,
}

impl RunConfig {
    pub fn new(instance_path: impl Into<PathBuf>, algo: Algo) -> Self {
        RunConfig {
            instance_path: instance_path.into(),
            algo,
            lambda: None,
            gamma: 0.5,
            max_iter: 10_000,
            tol: 1e-9,
            tol_inner: 1e-10,
            trace_path: None,
            trace_format: TraceFormat::Csv,
            check_invariants: true,
            seed: 0,
            workers: 0,
            x0: None,
            record_wall_time: false,
        }
    }
}

pub fn exit_code(stop: StopReason) -> i32 {
    match stop {
        StopReason::Converged | StopReason::FixedPoint => exit::OK,
        StopReason::MaxIter => exit::MAX_ITER,
    }
}

pub fn error_exit_code(err: &SolveError) -> i32 {
    match err {
        SolveError::InvalidParams(_) => exit::FAILURE,
        SolveError::Prox { .. } => exit::PROX_FAILURE,
        SolveError::InconsistentCuts { .. } => exit::INCONSISTENT_CUTS,
        SolveError::InvariantViolation { .. } => exit::INVARIANT_VIOLATION,
    }
}

fn failed(config: &RunConfig, code: i32, lambda: Option<f64>, error: String) -> Summary {
    Summary {
        algo: config.algo.as_str(),
        exit_code: code,
        stop: None,
        iterations: 0,
        final_point: None,
        max_invariant_violation: None,
        solution_residuals: None,
        lambda,
        error: Some(error),
    }
}

fn resolve_params(config: &RunConfig, loaded: &LoadedInstance) -> Result<SolverParams<f64>, String> {
    let dim = loaded.instance.dimension();
    let x0 = match (&config.x0, &loaded.x0) {
        (Some(v), _) if v.len() != dim => return Err(format!("--x0: expected {dim} entries, found {}", v.len())),
        (Some(v), _) => Point::from_slice(v),
        (None, Some(p)) => p.clone(),
        (None, None) => Point::zeros(dim),
    };
    let bound = loaded.instance.step_bound();
    let lambda = match config.lambda.or(loaded.lambda) {
        Some(l) => l,
        None if bound.is_finite() => 0.5 * bound,
        None => return Err("c1 = c2 = 0 leaves the step size unconstrained; pass --lambda".into()),
    };
    Ok(SolverParams::new(x0, lambda, lambda)
        .with_constant_lambda(lambda)
        .with_constant_gamma(config.gamma)
        .with_max_iter(config.max_iter)
        .with_tol_stop(config.tol)
        .with_tol_inner(config.tol_inner)
        .with_workers(config.workers)
        .with_abort_on_violation(config.check_invariants))
}

/// Runs one solve, streaming the trace to `config.trace_path`. The returned
/// summary carries the process exit code.
pub fn run(config: &RunConfig) -> Summary {
    let loaded = match load_instance(&config.instance_path, config.seed) {
        Ok(l) => l,
        Err(e) => return failed(config, exit::FAILURE, None, e.to_string()),
    };
    let params = match resolve_params(config, &loaded) {
        Ok(p) => p,
        Err(e) => return failed(config, exit::FAILURE, None, e),
    };
    let lambda = params.lambda_hi;
    let sink: Box<dyn Write> = match &config.trace_path {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => return failed(config, exit::FAILURE, Some(lambda), format!("{}: {e}", path.display())),
        },
        None => Box::new(io::sink()),
    };
    let mut writer = match TraceWriter::new(sink, config.trace_format) {
        Ok(w) => w,
        Err(e) => return failed(config, exit::FAILURE, Some(lambda), format!("trace: {e}")),
    };

    let mut io_error: Option<io::Error> = None;
    let mut worst = f64::NEG_INFINITY;
    let mut last: Option<(usize, Vec<f64>)> = None;
    let observe = |record: ceqp::IterationRecord<f64>| {
        worst = worst.max(record.checks.worst());
        last = Some((record.n + 1, record.x.as_slice().to_vec()));
        if io_error.is_none() {
            let row = TraceRow::new(&record, params.invariant_tol, config.record_wall_time);
            io_error = writer.write(&row).err();
        }
    };
    let result = match config.algo {
        Algo::Parallel => run_parallel_with(&loaded.instance, &params, observe),
        Algo::Cyclic => run_cyclic_with(&loaded.instance, &params, observe),
    };
    let rows = writer.rows();
    if let Err(e) = writer.finish() {
        io_error.get_or_insert(e);
    }
    let max_invariant_violation = (rows > 0).then_some(worst);

    let mut summary = match result {
        Ok(out) => {
            let residuals = loaded.instance.solution_residuals(&out.final_point, config.seed, SUMMARY_SAMPLES);
            Summary {
                algo: config.algo.as_str(),
                exit_code: exit_code(out.stop),
                stop: Some(out.stop.as_str()),
                iterations: out.iterations,
                final_point: Some(out.final_point.into_vec()),
                max_invariant_violation,
                solution_residuals: Some(residuals),
                lambda: Some(lambda),
                error: None,
            }
        }
        Err(e) => {
            let (iterations, point) = last.unzip();
            Summary {
                iterations: iterations.unwrap_or(0),
                final_point: point,
                max_invariant_violation,
                ..failed(config, error_exit_code(&e), Some(lambda), e.to_string())
            }
        }
    };
    if let Some(e) = io_error {
        summary.exit_code = exit::FAILURE;
        summary.error = Some(format!("trace: {e}"));
    }
    summary
}
