//! Trace rows and the run summary.

use std::io::{self, Write};

use ceqp::IterationRecord;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TraceFormat {
    Csv,
    Json,
}

pub const CSV_HEADER: &str =
    "n,active_index,x_norm_change,anchor_dist,max_y_residual,max_z_residual,fejer_slack,containment_ok,wall_ms";

/// One trace row. `fejer_slack` is the negated Fejér violation, so
/// nonnegative values mean the inequality held.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub active_index: Option<usize>,
    pub x: Vec<f64>,
    pub x_norm_change: f64,
    pub anchor_dist: f64,
    pub max_y_residual: f64,
    pub max_z_residual: f64,
    pub fejer_slack: Option<f64>,
    pub containment_ok: Option<bool>,
    pub wall_ms: Option<f64>,
}

impl TraceRow {
    pub fn new(record: &IterationRecord<f64>, invariant_tol: f64, wall_time: bool) -> Self {
        TraceRow {
            n: record.n,
            active_index: record.active_index,
            x: record.x.as_slice().to_vec(),
            x_norm_change: record.step,
            anchor_dist: record.anchor_dist,
            max_y_residual: record.max_y_residual(),
            max_z_residual: record.max_z_residual(),
            fejer_slack: record.checks.fejer.map(|v| -v),
            containment_ok: record.checks.containment_ok(invariant_tol),
            wall_ms: wall_time.then_some(record.wall_time.as_secs_f64() * 1e3),
        }
    }

    pub fn csv_line(&self) -> String {
        fn opt<V>(v: Option<V>, f: impl Fn(V) -> String) -> String {
            v.map(f).unwrap_or_default()
        }
        format!(
            "{},{},{:e},{:e},{:e},{:e},{},{},{}",
            self.n,
            opt(self.active_index, |i| i.to_string()),
            self.x_norm_change,
            self.anchor_dist,
            self.max_y_residual,
            self.max_z_residual,
            opt(self.fejer_slack, |v| format!("{v:e}")),
            opt(self.containment_ok, |b| b.to_string()),
            opt(self.wall_ms, |v| format!("{v:.3}")),
        )
    }
}

/// Streams rows to a CSV file or a JSON array.
pub struct TraceWriter<W: Write> {
    out: W,
    format: TraceFormat,
    rows: usize,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W, format: TraceFormat) -> io::Result<Self> {
        match format {
            TraceFormat::Csv => writeln!(out, "{CSV_HEADER}")?,
            TraceFormat::Json => write!(out, "[")?,
        }
        Ok(TraceWriter { out, format, rows: 0 })
    }

    pub fn write(&mut self, row: &TraceRow) -> io::Result<()> {
        match self.format {
            TraceFormat::Csv => writeln!(self.out, "{}", row.csv_line())?,
            TraceFormat::Json => {
                let sep = if self.rows == 0 { "\n" } else { ",\n" };
                write!(self.out, "{sep}  ")?;
                serde_json::to_writer(&mut self.out, row)?;
            }
        }
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(mut self) -> io::Result<W> {
        if self.format == TraceFormat::Json {
            writeln!(self.out, "{}]", if self.rows == 0 { "" } else { "\n" })?;
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Printed to stdout after every run, including failed ones.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub algo: &'static str,
    pub exit_code: i32,
    pub stop: Option<&'static str>,
    pub iterations: usize,
    pub final_point: Option<Vec<f64>>,
    pub max_invariant_violation: Option<f64>,
    /// Sampled `min_y f_i(x, y)` at the final point, per subproblem.
    pub solution_residuals: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries always serialize")
    }
}
