//! End-to-end CLI tests driving the `asls` binary: exit-code contract,
//! metrics schema, byte-identical reruns, sweep grids, dataset caching and
//! fault-injected verification.

use std::path::Path;
use std::process::{Command, Output};

use asls_cli::metrics::{parse_metrics, METRICS_HEADER};
use asls_cli::plot::PlotDoc;

fn asls(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_asls"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path
}

/// n = 100, batch 100, 10 epochs: exactly 10 steps.
const SMOKE: &str = r#"
[problem]
kind = "separable"
n = 100
d = 5
margin = 0.1
seed = 1

[[run]]
name = "smoke"
batch_size = 100
epochs = 10
seed = 3
[run.precond]
kind = "amsgrad"
[run.controller]
kind = "line_search"
mode = "armijo"
c = 0.5
eta_max = 100.0
[run.momentum]
kind = "moving_average"
beta = 0.9
"#;

/// Same problem driven by an Armijo SPS controller.
const SMOKE_SPS: &str = r#"
[problem]
kind = "separable"
n = 100
d = 5
margin = 0.1
seed = 1

[[run]]
name = "sps"
batch_size = 25
epochs = 8
seed = 2
[run.precond]
kind = "adagrad"
[run.controller]
kind = "sps"
mode = "armijo"
c = 0.5
eta_max = 50.0
smoothing = "auto"
"#;

#[test]
fn run_smoke_writes_csv_with_one_row_per_step() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    let out_dir = tmp.path().join("out");
    let output = asls(
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert!(output.status.success(), "{output:?}");

    let text = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert!(text.starts_with(METRICS_HEADER));
    let rows = parse_metrics(&text).unwrap();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r.run_name == "smoke" && r.seed == 3));
    assert!(out_dir.join("summary.json").exists());
    assert!(out_dir.join("trajectories/smoke.json").exists());
}

#[test]
fn reruns_with_the_same_config_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    let mut contents = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = tmp.path().join(sub);
        let output = asls(
            &[
                "run",
                "--config",
                config.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
            ],
            &[],
        );
        assert!(output.status.success());
        contents.push((
            std::fs::read(out_dir.join("metrics.csv")).unwrap(),
            std::fs::read(out_dir.join("summary.json")).unwrap(),
            std::fs::read(out_dir.join("plot_train_loss.json")).unwrap(),
        ));
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn csv_round_trips_and_plot_data_match_the_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    let out_dir = tmp.path().join("out");
    assert!(asls(
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    )
    .status
    .success());

    let text = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    let rows = parse_metrics(&text).unwrap();

    let loss_doc: PlotDoc = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("plot_train_loss.json")).unwrap(),
    )
    .unwrap();
    let step_doc: PlotDoc = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("plot_step_size.json")).unwrap(),
    )
    .unwrap();

    // 10 epochs, 1 step each: series lengths equal the epoch count and the
    // step-size panel equals the CSV column downsampled to one per epoch
    assert_eq!(loss_doc.series.len(), 1);
    assert_eq!(loss_doc.series[0].y.len(), 10);
    let expected: Vec<f64> = rows.iter().map(|r| r.step_size).collect();
    assert_eq!(step_doc.series[0].y, expected);
    let expected: Vec<f64> = rows.iter().map(|r| r.train_loss).collect();
    assert_eq!(loss_doc.series[0].y, expected);
}

#[test]
fn sweep_builds_a_log_spaced_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    let out_dir = tmp.path().join("out");
    let output = asls(
        &[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--grid",
            "1e-3:1e3:7",
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert!(output.status.success(), "{output:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    let entries = summary.as_array().unwrap();
    assert_eq!(entries.len(), 7);
    for (i, entry) in entries.iter().enumerate() {
        let name = entry["name"].as_str().unwrap();
        let expect = 10f64.powi(i as i32 - 3);
        assert_eq!(name, format!("smoke-eta{expect:.3e}"));
        assert_eq!(entry["status"], "ok");
    }
}

#[test]
fn verify_passes_clean_runs_and_flags_injected_decreases() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    let out_dir = tmp.path().join("out");
    assert!(asls(
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    )
    .status
    .success());

    let output = asls(&["verify", "--out", out_dir.to_str().unwrap()], &[]);
    assert!(output.status.success(), "{output:?}");
    assert!(out_dir.join("verify_report.json").exists());

    // inject a preconditioner decrease into the stored trajectory
    let traj_path = out_dir.join("trajectories/smoke.json");
    let mut traj: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&traj_path).unwrap()).unwrap();
    traj["steps"][4]["min_diag_diff"] = serde_json::json!(-1.0e-3);
    std::fs::write(&traj_path, serde_json::to_string_pretty(&traj).unwrap()).unwrap();

    let output = asls(&["verify", "--out", out_dir.to_str().unwrap()], &[]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");
}

#[test]
fn verify_reports_full_sps_bound_compliance() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMOKE_SPS);
    let out_dir = tmp.path().join("out");
    assert!(asls(
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    )
    .status
    .success());

    let output = asls(&["verify", "--out", out_dir.to_str().unwrap()], &[]);
    assert!(output.status.success(), "{output:?}");
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(out_dir.join("verify_report.json")).unwrap(),
    )
    .unwrap();
    let bounds = &report["trajectories"][0]["step_bounds"];
    assert_eq!(bounds["total_steps"], 32); // 4 steps/epoch x 8 epochs
    assert_eq!(bounds["violations"], 0);
}

#[test]
fn gen_data_caches_by_content_hash_and_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), SMOKE);
    let cache = tmp.path().join("cache");
    let output = asls(
        &["gen-data", "--config", config.to_str().unwrap()],
        &[("ASLS_DATA_DIR", cache.to_str().unwrap())],
    );
    assert!(output.status.success(), "{output:?}");
    let printed = String::from_utf8(output.stdout).unwrap();
    let path = Path::new(printed.trim());
    assert!(path.starts_with(&cache));
    assert!(path.file_name().unwrap().to_str().unwrap().starts_with("separable-"));

    // the cached file is itself a loadable libsvm dataset
    let file = std::fs::File::open(path).unwrap();
    let ds = asls_core::problems::parse_libsvm(std::io::BufReader::new(file)).unwrap();
    assert_eq!(ds.num_examples(), 100);
    assert_eq!(ds.num_features(), 5);

    // a libsvm problem config can then consume it via the cache dir
    let follow_up = format!(
        r#"
[problem]
kind = "libsvm"
path = "{}"

[[run]]
name = "from-cache"
batch_size = 20
epochs = 2
[run.precond]
kind = "adagrad"
[run.controller]
kind = "constant"
eta = 0.1
"#,
        path.file_name().unwrap().to_str().unwrap()
    );
    let config2 = tmp.path().join("config2.toml");
    std::fs::write(&config2, follow_up).unwrap();
    let out_dir = tmp.path().join("out2");
    let output = asls(
        &[
            "run",
            "--config",
            config2.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[("ASLS_DATA_DIR", cache.to_str().unwrap())],
    );
    assert!(output.status.success(), "{output:?}");
}

#[test]
fn bad_inputs_exit_2() {
    let tmp = tempfile::tempdir().unwrap();

    // malformed config
    let config = write_config(tmp.path(), "this is not toml [");
    let output = asls(&["run", "--config", config.to_str().unwrap()], &[]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");

    // malformed grid spec
    let config = write_config(tmp.path(), SMOKE);
    let output = asls(
        &[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--grid",
            "nonsense",
        ],
        &[],
    );
    assert_eq!(output.status.code(), Some(2), "{output:?}");

    // unknown subcommand (clap handles this one)
    let output = asls(&["frobnicate"], &[]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn repetitions_produce_distinct_seeded_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let body = format!("repetitions = 3\n{SMOKE}");
    let config = write_config(tmp.path(), &body);
    let out_dir = tmp.path().join("out");
    let output = asls(
        &[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--jobs",
            "2",
        ],
        &[],
    );
    assert!(output.status.success(), "{output:?}");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    let entries = summary.as_array().unwrap();
    assert_eq!(entries.len(), 3);
    let seeds: Vec<u64> = entries
        .iter()
        .map(|e| e["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, vec![3, 4, 5]);
    assert_eq!(entries[1]["name"], "smoke-seed4");
}
