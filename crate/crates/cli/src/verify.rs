//! Post-hoc verification of stored trajectories: hard invariants (monotone
//! preconditioners, AdaGrad trace lemmas, conservative step-sizes) fail the
//! command; step-size range checks are reported with violation fractions.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use asls_core::analysis::{
    check_adagrad_lemmas, check_amsgrad_monotone, check_step_bounds, BoundsReport, TheoryInputs,
};
use asls_core::{PrecondKind, StepSizeController, TrajectoryRecord};

use crate::runner::write_json;
use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryVerdict {
    pub file: String,
    pub precond: String,
    /// None when the check does not apply to this trajectory.
    pub monotone_ok: Option<bool>,
    pub adagrad_lemmas_ok: Option<bool>,
    pub conservative_ok: Option<bool>,
    pub step_bounds: Option<BoundsReport>,
    pub hard_failures: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub trajectories: Vec<TrajectoryVerdict>,
    pub hard_failures: usize,
}

pub fn verify_directory(out_dir: &Path) -> Result<(VerifyReport, PathBuf), CliError> {
    let traj_dir = out_dir.join("trajectories");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&traj_dir)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", traj_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no trajectory files under {}",
            traj_dir.display()
        )));
    }

    let mut verdicts = Vec::with_capacity(files.len());
    for file in &files {
        let text = std::fs::read_to_string(file)
            .map_err(|e| CliError::Failure(format!("cannot read {}: {e}", file.display())))?;
        let traj: TrajectoryRecord = serde_json::from_str(&text)
            .map_err(|e| CliError::Failure(format!("bad trajectory {}: {e}", file.display())))?;
        verdicts.push(verify_trajectory(file, &traj));
    }

    let hard_failures = verdicts.iter().map(|v| v.hard_failures.len()).sum();
    let report = VerifyReport {
        trajectories: verdicts,
        hard_failures,
    };
    let report_path = out_dir.join("verify_report.json");
    write_json(&report_path, &report)?;
    Ok((report, report_path))
}

fn verify_trajectory(file: &Path, traj: &TrajectoryRecord) -> TrajectoryVerdict {
    let kind = traj.meta.config.precond.kind;
    let mut hard_failures = Vec::new();

    // monotonicity is guaranteed for amsgrad, adagrad and identity
    let monotone_ok = match kind {
        PrecondKind::Amsgrad | PrecondKind::Adagrad | PrecondKind::Identity => {
            let ok = check_amsgrad_monotone(traj);
            if !ok {
                hard_failures.push("preconditioner diagonal decreased".into());
            }
            Some(ok)
        }
        _ => None,
    };

    let adagrad_lemmas_ok = if kind == PrecondKind::Adagrad && traj.meta.config.precond.clamp.is_none()
    {
        match check_adagrad_lemmas(traj) {
            Ok(report) => {
                let ok = report.norm_lemma_holds && report.trace_lemma_holds;
                if !ok {
                    hard_failures.push(format!("adagrad trace lemmas violated: {report:?}"));
                }
                Some(ok)
            }
            Err(_) => None,
        }
    } else {
        None
    };

    let conservative_ok = if traj.meta.config.controller.is_conservative() {
        let ok = traj
            .steps
            .windows(2)
            .all(|pair| pair[1].eta <= pair[0].eta);
        if !ok {
            hard_failures.push("conservative controller increased the step-size".into());
        }
        Some(ok)
    } else {
        None
    };

    // range compliance is reported, not hard-failed (backtracking-grid
    // near-misses are surfaced via the fractions)
    let step_bounds = match (&traj.meta.config.controller, traj.meta.l_max) {
        (StepSizeController::Constant { .. }, _) | (_, None) => None,
        (_, Some(l_max)) => {
            let theory = TheoryInputs {
                l_max,
                a_min: 0.0,
                a_max: 0.0,
                radius: 0.0,
                dim: traj.meta.dim,
                beta: 0.0,
                sigma_sq: 0.0,
            };
            Some(check_step_bounds(traj, &theory))
        }
    };

    TrajectoryVerdict {
        file: file.display().to_string(),
        precond: format!("{kind:?}").to_lowercase(),
        monotone_ok,
        adagrad_lemmas_ok,
        conservative_ok,
        step_bounds,
        hard_failures,
    }
}
