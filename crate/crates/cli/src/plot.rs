//! Plot-ready JSON: one document per panel kind, each a list of named series
//! sampled once per epoch (last step of the epoch).

use serde::{Deserialize, Serialize};

use crate::metrics::MetricsRow;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    TrainLoss,
    StepSize,
}

impl Panel {
    pub fn file_name(&self) -> &'static str {
        match self {
            Panel::TrainLoss => "plot_train_loss.json",
            Panel::StepSize => "plot_step_size.json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotDoc {
    pub series: Vec<Series>,
}

/// Build one panel for the requested runs. Rows are keyed by
/// `name` + `-seed<seed>` when a run has repetitions; callers pass the exact
/// series names present in the metrics.
pub fn emit_plot_data(
    rows: &[MetricsRow],
    names: &[String],
    panel: Panel,
) -> Result<PlotDoc, CliError> {
    let mut series = Vec::with_capacity(names.len());
    for name in names {
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut current_epoch = None;
        for row in rows.iter().filter(|r| &r.run_name == name) {
            // keep the last step of each epoch
            match current_epoch {
                Some(epoch) if epoch == row.epoch => {
                    *y.last_mut().unwrap() = pick(row, panel);
                }
                _ => {
                    current_epoch = Some(row.epoch);
                    x.push((row.epoch + 1) as f64);
                    y.push(pick(row, panel));
                }
            }
        }
        if x.is_empty() {
            return Err(CliError::Failure(format!("unknown run name '{name}'")));
        }
        series.push(Series {
            name: name.clone(),
            x,
            y,
        });
    }
    Ok(PlotDoc { series })
}

fn pick(row: &MetricsRow, panel: Panel) -> f64 {
    match panel {
        Panel::TrainLoss => row.train_loss,
        Panel::StepSize => row.step_size,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<MetricsRow> {
        let mut out = Vec::new();
        for epoch in 0..3 {
            for step in 0..2 {
                out.push(MetricsRow {
                    run_name: "r".into(),
                    seed: 0,
                    epoch,
                    iter: epoch * 2 + step,
                    train_loss: (epoch + 1) as f64,
                    step_size: (epoch * 2 + step) as f64,
                    grad_norm_sq: 0.0,
                    precond_norm_sq: 0.0,
                    backtracks: 0,
                    a_min: 1.0,
                    a_max: 1.0,
                    trace_a: 1.0,
                });
            }
        }
        out
    }

    #[test]
    fn loss_panel_has_one_point_per_epoch() {
        let doc = emit_plot_data(&rows(), &["r".into()], Panel::TrainLoss).unwrap();
        assert_eq!(doc.series.len(), 1);
        assert_eq!(doc.series[0].x, vec![1.0, 2.0, 3.0]);
        assert_eq!(doc.series[0].y, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn step_size_panel_downsamples_to_last_step_of_epoch() {
        let doc = emit_plot_data(&rows(), &["r".into()], Panel::StepSize).unwrap();
        assert_eq!(doc.series[0].y, vec![1.0, 3.0, 5.0]);
    }

    #[test]
    fn unknown_run_is_an_error_naming_it() {
        let err = emit_plot_data(&rows(), &["missing".into()], Panel::TrainLoss).unwrap_err();
        assert!(err.to_string().contains("missing"));
    }
}
