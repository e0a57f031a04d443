//! Metrics CSV with a fixed, versioned header. Floats are serialized with 17
//! significant digits so write-then-parse recovers values exactly, and rows
//! are emitted in deterministic order, so reruns produce byte-identical files.

use std::io::Write;
use std::path::Path;

use asls_core::TrajectoryRecord;

use crate::CliError;

pub const METRICS_HEADER: &str =
    "run_name,seed,epoch,iter,train_loss,step_size,grad_norm_sq,precond_norm_sq,backtracks,a_min,a_max,trace_A";

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub run_name: String,
    pub seed: u64,
    pub epoch: usize,
    pub iter: usize,
    pub train_loss: f64,
    pub step_size: f64,
    pub grad_norm_sq: f64,
    pub precond_norm_sq: f64,
    pub backtracks: usize,
    pub a_min: f64,
    pub a_max: f64,
    pub trace_a: f64,
}

/// 17 significant digits, scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row per step; the train_loss column carries the end-of-epoch full
/// train loss of the row's epoch.
pub fn rows_from_trajectory(name: &str, traj: &TrajectoryRecord) -> Vec<MetricsRow> {
    let spe = traj.meta.steps_per_epoch.max(1);
    traj.steps
        .iter()
        .map(|rec| {
            let epoch = rec.k / spe;
            MetricsRow {
                run_name: name.to_string(),
                seed: traj.meta.config.seed,
                epoch,
                iter: rec.k,
                train_loss: traj.epoch_train_loss[epoch],
                step_size: rec.eta,
                grad_norm_sq: rec.grad_norm_sq,
                precond_norm_sq: rec.precond_norm_sq,
                backtracks: rec.backtracks,
                a_min: rec.a_min,
                a_max: rec.a_max,
                trace_a: rec.trace_a,
            }
        })
        .collect()
}

pub fn write_metrics(rows: &[MetricsRow], path: &Path) -> Result<(), CliError> {
    let mut buf = Vec::new();
    render_metrics(rows, &mut buf).map_err(|e| CliError::Failure(e.to_string()))?;
    std::fs::write(path, buf)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

pub fn render_metrics(rows: &[MetricsRow], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{METRICS_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.run_name,
            r.seed,
            r.epoch,
            r.iter,
            format_float(r.train_loss),
            format_float(r.step_size),
            format_float(r.grad_norm_sq),
            format_float(r.precond_norm_sq),
            r.backtracks,
            format_float(r.a_min),
            format_float(r.a_max),
            format_float(r.trace_a),
        )?;
    }
    Ok(())
}

pub fn parse_metrics(text: &str) -> Result<Vec<MetricsRow>, CliError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == METRICS_HEADER => {}
        other => {
            return Err(CliError::Failure(format!(
                "unexpected metrics header: {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 12 {
            return Err(CliError::Failure(format!(
                "metrics row {} has {} fields",
                i + 2,
                fields.len()
            )));
        }
        let num =
            |s: &str| -> Result<f64, CliError> {
                s.parse()
                    .map_err(|e| CliError::Failure(format!("metrics row {}: {e}", i + 2)))
            };
        let int = |s: &str| -> Result<usize, CliError> {
            s.parse()
                .map_err(|e| CliError::Failure(format!("metrics row {}: {e}", i + 2)))
        };
        rows.push(MetricsRow {
            run_name: fields[0].to_string(),
            seed: fields[1]
                .parse()
                .map_err(|e| CliError::Failure(format!("metrics row {}: {e}", i + 2)))?,
            epoch: int(fields[2])?,
            iter: int(fields[3])?,
            train_loss: num(fields[4])?,
            step_size: num(fields[5])?,
            grad_norm_sq: num(fields[6])?,
            precond_norm_sq: num(fields[7])?,
            backtracks: int(fields[8])?,
            a_min: num(fields[9])?,
            a_max: num(fields[10])?,
            trace_a: num(fields[11])?,
        });
    }
    Ok(rows)
}
