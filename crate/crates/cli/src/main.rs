//! `asls` — experiment runner for adaptive-gradient optimizers with
//! line-search and Polyak step-sizes.
//!
//! Exit codes: 0 success, 1 invariant/acceptance failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use asls_cli::config::{data_dir, ExperimentConfig};
use asls_cli::runner::{execute_experiment, execute_instances, parse_grid};
use asls_cli::{verify, CliError};

#[derive(Parser)]
#[command(name = "asls", about = "Adaptive-gradient optimizer benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every run in an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (default: the config's out_dir, else ./asls-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the base seed of every run.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of runs to execute in parallel.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Generate the config's dataset into the cache directory.
    GenData {
        #[arg(long)]
        config: PathBuf,
        /// Cache directory (default: ASLS_DATA_DIR, else the current dir).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check invariants on the trajectories stored under an output dir.
    Verify {
        #[arg(long)]
        out: PathBuf,
    },
    /// Constant step-size grid from the first run of the config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Grid spec LO:HI:COUNT, log-spaced (e.g. 1e-3:1e3:7).
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("asls: {e}");
            match e {
                CliError::Usage(_) => ExitCode::from(2),
                CliError::Failure(_) => ExitCode::from(1),
            }
        }
    }
}

fn resolve_out(cli_out: Option<PathBuf>, config_out: &Option<PathBuf>) -> PathBuf {
    cli_out
        .or_else(|| config_out.clone())
        .unwrap_or_else(|| PathBuf::from("asls-out"))
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            jobs,
        } => {
            let experiment = ExperimentConfig::load(&config)?;
            let out_dir = resolve_out(out, &experiment.out_dir);
            let objective = experiment.problem.build_objective(&data_dir())?;
            let outcome =
                execute_experiment(&experiment, objective.as_ref(), &out_dir, seed, jobs)?;
            for summary in &outcome.summaries {
                println!(
                    "{}: {} ({} iterations, final loss {})",
                    summary.name,
                    summary.status,
                    summary.iterations,
                    summary
                        .final_train_loss
                        .map_or("n/a".into(), |v| format!("{v:.6e}"))
                );
            }
            println!("wrote {}", out_dir.join("metrics.csv").display());
            if outcome.aborted > 0 {
                return Err(CliError::Failure(format!(
                    "{} run(s) aborted",
                    outcome.aborted
                )));
            }
            Ok(())
        }
        Command::GenData { config, out } => {
            let experiment = ExperimentConfig::load(&config)?;
            let cache = out.unwrap_or_else(data_dir);
            std::fs::create_dir_all(&cache)
                .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", cache.display())))?;
            let ds = experiment.problem.build_dataset(&data_dir())?;
            let path = cache.join(experiment.problem.cache_file_name());
            let mut buf = Vec::new();
            asls_core::problems::write_libsvm(&ds, &mut buf).map_err(CliError::from_core)?;
            std::fs::write(&path, buf)
                .map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))?;
            println!("{}", path.display());
            Ok(())
        }
        Command::Verify { out } => {
            let (report, report_path) = verify::verify_directory(&out)?;
            for verdict in &report.trajectories {
                let bounds = verdict
                    .step_bounds
                    .as_ref()
                    .map(|b| format!(", bound violations {}/{}", b.violations, b.total_steps))
                    .unwrap_or_default();
                println!(
                    "{}: {}{}",
                    verdict.file,
                    if verdict.hard_failures.is_empty() {
                        "ok"
                    } else {
                        "FAILED"
                    },
                    bounds
                );
            }
            if report.hard_failures > 0 {
                return Err(CliError::Failure(format!(
                    "{} hard invariant failure(s); report at {}",
                    report.hard_failures,
                    report_path.display()
                )));
            }
            println!("all invariants hold; report at {}", report_path.display());
            Ok(())
        }
        Command::Sweep {
            config,
            grid,
            out,
            seed,
            jobs,
        } => {
            let experiment = ExperimentConfig::load(&config)?;
            let out_dir = resolve_out(out, &experiment.out_dir);
            let values = parse_grid(&grid)?;
            let template = &experiment.runs[0];
            let instances: Vec<(String, asls_core::RunConfig)> = values
                .iter()
                .map(|eta| {
                    let mut cfg = template.config.clone();
                    if let Some(s) = seed {
                        cfg.seed = s;
                    }
                    cfg.controller = asls_core::StepSizeController::Constant { eta: *eta };
                    (format!("{}-eta{:.3e}", template.name, eta), cfg)
                })
                .collect();
            let objective = experiment.problem.build_objective(&data_dir())?;
            let outcome = execute_instances(&instances, objective.as_ref(), &out_dir, jobs)?;
            for summary in &outcome.summaries {
                println!(
                    "{}: {} (final loss {})",
                    summary.name,
                    summary.status,
                    summary
                        .final_train_loss
                        .map_or("n/a".into(), |v| format!("{v:.6e}"))
                );
            }
            println!("wrote {}", out_dir.join("metrics.csv").display());
            Ok(())
        }
    }
}
