use std::path::PathBuf;
use std::process::ExitCode;

use ceqp_cli::{exit, run, Algo, RunConfig, TraceFormat};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ceqp", version, about = "Common solutions of equilibrium problems by extragradient cutting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file and write the iteration trace.
    Solve(SolveArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, env = "CEQP_INSTANCE")]
    instance: PathBuf,
    #[arg(long, env = "CEQP_ALGO", value_enum, default_value = "parallel")]
    algo: Algo,
    /// Constant step size [default: from the file, else half the step bound]
    #[arg(long, env = "CEQP_LAMBDA")]
    lambda: Option<f64>,
    #[arg(long, env = "CEQP_GAMMA", default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, env = "CEQP_MAX_ITER", default_value_t = 10_000)]
    max_iter: usize,
    /// Stopping tolerance on residuals and step length
    #[arg(long, env = "CEQP_TOL", default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, env = "CEQP_TOL_INNER", default_value_t = 1e-10)]
    tol_inner: f64,
    #[arg(long, env = "CEQP_TRACE")]
    trace: Option<PathBuf>,
    #[arg(long, env = "CEQP_FORMAT", value_enum, default_value = "csv")]
    format: TraceFormat,
    /// Keep going when a per-iteration invariant check fails
    #[arg(long, env = "CEQP_NO_INVARIANT_CHECKS")]
    no_invariant_checks: bool,
    /// Seed for the sampled certificates and diagnostics
    #[arg(long, env = "CEQP_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads for the parallel solver; 0 uses all cores
    #[arg(long, env = "CEQP_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Starting point, comma separated [default: from the file, else 0]
    #[arg(long, env = "CEQP_X0", value_delimiter = ',', allow_negative_numbers = true)]
    x0: Option<Vec<f64>>,
    /// Fill the wall_ms trace column (makes traces nondeterministic)
    #[arg(long, env = "CEQP_RECORD_WALL_TIME")]
    record_wall_time: bool,
}

impl From<SolveArgs> for RunConfig {
    fn from(a: SolveArgs) -> Self {
        RunConfig {
            instance_path: a.instance,
            algo: a.algo,
            lambda: a.lambda,
            gamma: a.gamma,
            max_iter: a.max_iter,
            tol: a.tol,
            tol_inner: a.tol_inner,
            trace_path: a.trace,
            trace_format: a.format,
            check_invariants: !a.no_invariant_checks,
            seed: a.seed,
            workers: a.workers,
            x0: a.x0,
            record_wall_time: a.record_wall_time,
        }
    }
}

fn main() -> ExitCode {
    // usage errors exit with 1; 2 means the iteration budget ran out
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::FAILURE as u8 } else { 0 });
        }
    };
    let Command::Solve(args) = cli.command;
    let summary = run(&args.into());
    println!("{}", summary.to_json());
    if let Some(e) = &summary.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(summary.exit_code as u8)
}
