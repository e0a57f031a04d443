//! Experiment execution: expand the run grid, execute (optionally in
//! parallel), and write metrics.csv, summary.json, per-run trajectory files
//! and plot data into the output directory.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use asls_core::optimizer::run;
use asls_core::{FiniteSumObjective, RunConfig, TrajectoryRecord};

use crate::config::{ExperimentConfig, NamedRun};
use crate::metrics::{rows_from_trajectory, write_metrics, MetricsRow};
use crate::plot::{emit_plot_data, Panel};
use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub seed: u64,
    pub status: String,
    pub iterations: usize,
    pub epochs: usize,
    pub final_train_loss: Option<f64>,
    pub final_step_size: Option<f64>,
    /// Steps whose line-search exhausted its backtracking budget.
    pub exhausted_searches: usize,
    pub l_max: Option<f64>,
}

pub struct ExperimentOutcome {
    pub summaries: Vec<RunSummary>,
    pub aborted: usize,
}

/// Expand `repetitions` into per-seed run instances. Repetition r shifts the
/// run's seed by r; a global seed override replaces the base seed first.
fn expand(
    runs: &[NamedRun],
    repetitions: usize,
    seed_override: Option<u64>,
) -> Vec<(String, RunConfig)> {
    let mut expanded = Vec::with_capacity(runs.len() * repetitions);
    for named in runs {
        for rep in 0..repetitions {
            let mut config = named.config.clone();
            if let Some(seed) = seed_override {
                config.seed = seed;
            }
            config.seed = config.seed.wrapping_add(rep as u64);
            let name = if repetitions > 1 {
                format!("{}-seed{}", named.name, config.seed)
            } else {
                named.name.clone()
            };
            expanded.push((name, config));
        }
    }
    expanded
}

pub fn execute_experiment(
    config: &ExperimentConfig,
    objective: &(dyn FiniteSumObjective + Send + Sync),
    out_dir: &Path,
    seed_override: Option<u64>,
    jobs: Option<usize>,
) -> Result<ExperimentOutcome, CliError> {
    let instances = expand(&config.runs, config.repetitions, seed_override);
    execute_instances(&instances, objective, out_dir, jobs)
}

pub fn execute_instances(
    instances: &[(String, RunConfig)],
    objective: &(dyn FiniteSumObjective + Send + Sync),
    out_dir: &Path,
    jobs: Option<usize>,
) -> Result<ExperimentOutcome, CliError> {
    let results: Vec<Result<_, asls_core::Error>> = match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| CliError::Failure(e.to_string()))?;
            pool.install(|| {
                instances
                    .par_iter()
                    .map(|(_, cfg)| run(objective, cfg))
                    .collect()
            })
        }
        None => instances
            .par_iter()
            .map(|(_, cfg)| run(objective, cfg))
            .collect(),
    };

    std::fs::create_dir_all(out_dir.join("trajectories"))
        .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut all_rows: Vec<MetricsRow> = Vec::new();
    let mut summaries = Vec::with_capacity(instances.len());
    let mut completed_names = Vec::new();
    let mut aborted = 0;

    for ((name, cfg), result) in instances.iter().zip(results) {
        match result {
            Ok(output) => {
                let traj = &output.trajectory;
                all_rows.extend(rows_from_trajectory(name, traj));
                write_trajectory(out_dir, name, traj)?;
                summaries.push(RunSummary {
                    name: name.clone(),
                    seed: cfg.seed,
                    status: "ok".into(),
                    iterations: traj.steps.len(),
                    epochs: cfg.epochs,
                    final_train_loss: traj.epoch_train_loss.last().copied(),
                    final_step_size: traj.steps.last().map(|r| r.eta),
                    exhausted_searches: traj.steps.iter().filter(|r| r.warning).count(),
                    l_max: traj.meta.l_max,
                });
                completed_names.push(name.clone());
            }
            Err(e) => {
                aborted += 1;
                summaries.push(RunSummary {
                    name: name.clone(),
                    seed: cfg.seed,
                    status: format!("aborted: {e}"),
                    iterations: 0,
                    epochs: cfg.epochs,
                    final_train_loss: None,
                    final_step_size: None,
                    exhausted_searches: 0,
                    l_max: None,
                });
            }
        }
    }

    write_metrics(&all_rows, &out_dir.join("metrics.csv"))?;
    write_json(&out_dir.join("summary.json"), &summaries)?;
    for panel in [Panel::TrainLoss, Panel::StepSize] {
        if completed_names.is_empty() {
            write_json(&out_dir.join(panel.file_name()), &crate::plot::PlotDoc { series: vec![] })?;
        } else {
            let doc = emit_plot_data(&all_rows, &completed_names, panel)?;
            write_json(&out_dir.join(panel.file_name()), &doc)?;
        }
    }

    Ok(ExperimentOutcome { summaries, aborted })
}

pub fn trajectory_path(out_dir: &Path, name: &str) -> PathBuf {
    out_dir.join("trajectories").join(format!("{name}.json"))
}

fn write_trajectory(out_dir: &Path, name: &str, traj: &TrajectoryRecord) -> Result<(), CliError> {
    write_json(&trajectory_path(out_dir, name), traj)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Failure(format!("serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

/// Parse a LO:HI:COUNT grid spec into log-spaced values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "grid must be LO:HI:COUNT, got '{spec}'"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|e| CliError::Usage(format!("bad grid lower bound: {e}")))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|e| CliError::Usage(format!("bad grid upper bound: {e}")))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|e| CliError::Usage(format!("bad grid count: {e}")))?;
    if !(lo > 0.0 && hi >= lo && count >= 1) {
        return Err(CliError::Usage(format!(
            "grid requires 0 < LO <= HI and COUNT >= 1, got '{spec}'"
        )));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (log_lo, log_hi) = (lo.log10(), hi.log10());
    Ok((0..count)
        .map(|i| 10f64.powf(log_lo + (log_hi - log_lo) * i as f64 / (count - 1) as f64))
        .collect())
}
