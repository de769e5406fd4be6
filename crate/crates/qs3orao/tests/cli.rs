//! End-to-end tests of the command-line interface: every subcommand, the
//! exit-code contract, seed resolution, and artifact routing.

use ndarray::Array2;
use qs3orao::data::gaussian_ordinal;
use qs3orao::{KernelSpec, RankModel, Thresholds};
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qs3orao"))
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn qs3orao");
    assert!(
        out.status.success(),
        "command failed with {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(cmd: &mut Command) -> i32 {
    cmd.output().expect("spawn qs3orao").status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not one JSON document: {e}\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

/// Writes an ordinal dataset as CSV with the label in the last column.
fn write_labeled_csv(path: &Path, means: &[f64], noise: f64, per_class: usize, d: usize, seed: u64) {
    let ds = gaussian_ordinal(means, noise, per_class, d, seed).expect("fixture");
    let mut text = String::new();
    for (row, &label) in ds.features().rows().into_iter().zip(ds.labels()) {
        for v in row.iter() {
            text.push_str(&v.to_string());
            text.push(',');
        }
        text.push_str(&label.to_string());
        text.push('\n');
    }
    std::fs::write(path, text).expect("write csv");
}

fn write_features_csv(path: &Path, rows: &Array2<f64>) {
    let mut text = String::new();
    for row in rows.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).expect("write csv");
}

#[test]
fn discretize_bins_target_column_in_row_order() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("raw.csv");
    let output = dir.path().join("binned.csv");
    let mut text = String::new();
    for i in 0..12 {
        text.push_str(&format!("{},{}\n", i as f64 * 0.5, (12 - i) as f64));
    }
    std::fs::write(&input, text).unwrap();

    let out = run_ok(bin().args([
        "discretize",
        "--in",
        input.to_str().unwrap(),
        "--out",
        output.to_str().unwrap(),
        "--k",
        "3",
    ]));
    let echo = stdout_json(&out);
    assert_eq!(echo["schema_version"], 1);
    assert_eq!(echo["command"], "discretize");
    assert_eq!(echo["result"]["rows"], 12);
    assert_eq!(echo["result"]["bin_counts"], serde_json::json!([4, 4, 4]));

    let binned = std::fs::read_to_string(&output).unwrap();
    let lines: Vec<&str> = binned.lines().collect();
    assert_eq!(lines.len(), 12);
    // Targets descend with the row index, so the first rows land in the
    // top bin and the last rows in the bottom bin.
    assert!(lines[0].ends_with(",3"));
    assert!(lines[11].ends_with(",1"));
    assert!(lines[0].starts_with("0,"));
}

#[test]
fn train_with_defaults_reaches_high_auc_on_separable_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    let model = dir.path().join("model.qs3");
    let curve = dir.path().join("curve.csv");
    write_labeled_csv(&data, &[-2.0, 0.0, 2.0], 0.3, 250, 2, 400);
    write_labeled_csv(&test, &[-2.0, 0.0, 2.0], 0.3, 60, 2, 401);

    let out = run_ok(bin().args([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--curve-out",
        curve.to_str().unwrap(),
        "--seed",
        "9",
    ]));
    let echo = stdout_json(&out);
    assert_eq!(echo["command"], "train");
    assert_eq!(echo["config"]["lambda"], 1.0);
    assert_eq!(echo["config"]["theta"], 1.5);
    assert_eq!(echo["config"]["iters"], 300);
    assert_eq!(echo["config"]["seed"], 9);
    assert_eq!(echo["result"]["n_labeled"], 500);
    assert_eq!(echo["result"]["n_unlabeled"], 250);
    assert_eq!(echo["result"]["k"], 3);
    assert!(echo["result"]["train_ns"].as_u64().unwrap() > 0);

    let curve_text = std::fs::read_to_string(&curve).unwrap();
    let mut lines = curve_text.lines();
    assert_eq!(lines.next(), Some("i,eta,surrogate_risk,elapsed_ns"));
    assert_eq!(lines.count(), 300);

    let out = run_ok(bin().args([
        "eval",
        "--model",
        model.to_str().unwrap(),
        "--data",
        test.to_str().unwrap(),
    ]));
    let echo = stdout_json(&out);
    assert_eq!(echo["command"], "eval");
    let auc = echo["metrics"]["overall_auc"].as_f64().unwrap();
    assert!(auc >= 0.95, "default-train AUC {auc} below 0.95");
}

#[test]
fn predict_is_deterministic_and_routes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    let model = dir.path().join("model.qs3");
    write_labeled_csv(&data, &[-2.0, 0.0, 2.0], 0.4, 60, 2, 402);
    run_ok(bin().args([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--n-labeled",
        "90",
        "--iters",
        "80",
        "--m",
        "16",
        "--batch",
        "4",
        "--seed",
        "10",
    ]));

    let probes = dir.path().join("probes.csv");
    let rows = Array2::from_shape_fn((8, 2), |(r, c)| r as f64 * 0.4 - 1.6 + c as f64 * 0.1);
    write_features_csv(&probes, &rows);

    // Scores to stdout: echo must move to stderr and stdout must hold one
    // line per row.
    let out = run_ok(bin().args([
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--in",
        probes.to_str().unwrap(),
    ]));
    let scores_a = String::from_utf8(out.stdout).unwrap();
    assert_eq!(scores_a.lines().count(), 8);
    let echo: serde_json::Value = serde_json::from_slice(&out.stderr).expect("echo on stderr");
    assert_eq!(echo["command"], "predict");
    assert_eq!(echo["config"]["mode"], "scores");

    let out = run_ok(bin().args([
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--in",
        probes.to_str().unwrap(),
    ]));
    let scores_b = String::from_utf8(out.stdout).unwrap();
    assert_eq!(scores_a, scores_b, "same model and input must score identically");

    // Labels to a file: echo returns to stdout.
    let labels_out = dir.path().join("labels.txt");
    let out = run_ok(bin().args([
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--in",
        probes.to_str().unwrap(),
        "--out",
        labels_out.to_str().unwrap(),
        "--labels",
    ]));
    let echo = stdout_json(&out);
    assert_eq!(echo["config"]["mode"], "labels");
    let labels = std::fs::read_to_string(&labels_out).unwrap();
    assert_eq!(labels.lines().count(), 8);
    for line in labels.lines() {
        let v: usize = line.parse().expect("integer label");
        assert!((1..=3).contains(&v));
    }
    // Scores rise with the informative feature, so labels are weakly
    // increasing across the probe sweep.
    let parsed: Vec<usize> = labels.lines().map(|l| l.parse().unwrap()).collect();
    assert!(parsed.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn eval_writes_json_artifact_and_echoes() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    let model = dir.path().join("model.qs3");
    let json_out = dir.path().join("metrics.json");
    write_labeled_csv(&data, &[-2.0, 0.0, 2.0], 0.4, 50, 2, 403);
    run_ok(bin().args([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--n-labeled",
        "90",
        "--iters",
        "60",
        "--m",
        "16",
        "--batch",
        "4",
        "--seed",
        "11",
    ]));
    let out = run_ok(bin().args([
        "eval",
        "--model",
        model.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
        "--json-out",
        json_out.to_str().unwrap(),
    ]));
    let echo = stdout_json(&out);
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(echo, file, "file artifact and stdout echo must match");
    assert!(file["metrics"]["overall_auc"].as_f64().unwrap() > 0.5);
    assert_eq!(file["metrics"]["per_subproblem_auc"].as_array().unwrap().len(), 2);
}

#[test]
fn null_model_evaluates_to_chance_auc() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("test.csv");
    write_labeled_csv(&data, &[-1.0, 0.0, 1.0], 0.5, 40, 2, 404);

    let spec = KernelSpec::new(1.0, 2).unwrap();
    let thresholds = Thresholds::new(vec![-0.5, 0.5]).unwrap();
    let null = RankModel::new(spec, 123, 8, Array2::zeros((0, 16)), thresholds, 3).unwrap();
    let model_path = dir.path().join("null.qs3");
    null.save(&model_path).unwrap();

    let out = run_ok(bin().args([
        "eval",
        "--model",
        model_path.to_str().unwrap(),
        "--data",
        data.to_str().unwrap(),
    ]));
    let echo = stdout_json(&out);
    let auc = echo["metrics"]["overall_auc"].as_f64().unwrap();
    assert!((auc - 0.5).abs() < 1e-12, "null model AUC {auc} not 0.5");
}

#[test]
fn grid_search_reports_every_cell_and_a_best() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    let json_out = dir.path().join("grid.json");
    write_labeled_csv(&data, &[-2.0, 0.0, 2.0], 0.5, 60, 2, 405);

    let out = run_ok(bin().args([
        "grid-search",
        "--data",
        data.to_str().unwrap(),
        "--n-labeled",
        "80",
        "--folds",
        "2",
        "--lambda-grid",
        "0.5,1",
        "--sigma-grid",
        "0.5",
        "--gamma-grid",
        "0.5,1",
        "--m",
        "8",
        "--iters",
        "40",
        "--batch",
        "4",
        "--seed",
        "12",
        "--json-out",
        json_out.to_str().unwrap(),
    ]));
    let echo = stdout_json(&out);
    assert_eq!(echo["command"], "grid-search");
    let cells = echo["table"].as_array().unwrap();
    assert_eq!(cells.len(), 4, "2 lambdas x 1 sigma x 2 gammas");
    for cell in cells {
        let aucs = cell["fold_aucs"].as_array().unwrap();
        assert_eq!(aucs.len(), 2);
        let mean = cell["mean_auc"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&mean));
    }
    let best = &echo["best"];
    assert!(best["mean_auc"].as_f64().unwrap() > 0.5);
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(echo, file);
}

#[test]
fn bench_writes_csv_table_with_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    let csv_out = dir.path().join("bench.csv");
    write_labeled_csv(&data, &[-2.0, 0.0, 2.0], 0.5, 120, 2, 406);

    let out = run_ok(bin().args([
        "bench",
        "--data",
        data.to_str().unwrap(),
        "--n-labeled",
        "60",
        "--unlabeled-sizes",
        "50,200",
        "--repeats",
        "1",
        "--iters",
        "30",
        "--m",
        "8",
        "--batch",
        "4",
        "--seed",
        "13",
        "--csv-out",
        csv_out.to_str().unwrap(),
    ]));
    let echo = stdout_json(&out);
    assert_eq!(echo["command"], "bench");

    let csv = std::fs::read_to_string(&csv_out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n_u,mean_train_ns,peak_coeff_bytes");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("50,"));
    assert!(lines[2].starts_with("200,"));
    let bytes: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(bytes[0], bytes[1], "coefficient bytes must not vary with pool size");
}

#[test]
fn environment_seed_overrides_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    let model = dir.path().join("model.qs3");
    write_labeled_csv(&data, &[-2.0, 0.0, 2.0], 0.4, 40, 2, 407);

    let out = run_ok(bin()
        .args([
            "train",
            "--data",
            data.to_str().unwrap(),
            "--model-out",
            model.to_str().unwrap(),
            "--n-labeled",
            "60",
            "--iters",
            "20",
            "--m",
            "8",
            "--batch",
            "4",
            "--seed",
            "1",
        ])
        .env("QS3ORAO_SEED", "2"));
    let echo = stdout_json(&out);
    assert_eq!(echo["config"]["seed"], 2, "environment seed must win over the flag");

    let code = bin()
        .args([
            "train",
            "--data",
            data.to_str().unwrap(),
            "--model-out",
            model.to_str().unwrap(),
        ])
        .env("QS3ORAO_SEED", "not-a-number")
        .output()
        .unwrap()
        .status
        .code()
        .unwrap();
    assert_eq!(code, 3, "unparseable environment seed is a config error");
}

#[test]
fn config_file_fills_gaps_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    let model = dir.path().join("model.qs3");
    let config = dir.path().join("run.toml");
    write_labeled_csv(&data, &[-2.0, 0.0, 2.0], 0.4, 40, 2, 408);
    std::fs::write(&config, "lambda = 2.0\nm = 8\niters = 20\nbatch = 4\nn_labeled = 60\n").unwrap();

    let out = run_ok(bin().args([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "14",
    ]));
    let echo = stdout_json(&out);
    assert_eq!(echo["config"]["lambda"], 2.0);
    assert_eq!(echo["config"]["theta"], 0.75, "default theta tracks 1.5 / lambda");
    assert_eq!(echo["config"]["m"], 8);

    let out = run_ok(bin().args([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--lambda",
        "0.5",
        "--seed",
        "14",
    ]));
    let echo = stdout_json(&out);
    assert_eq!(echo["config"]["lambda"], 0.5, "flag must override the file value");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "lambda = 1.0\nunknown_knob = 3\n").unwrap();
    let code = exit_code(bin().args([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--config",
        bad.to_str().unwrap(),
    ]));
    assert_eq!(code, 3, "unknown config keys are a config error");
}

#[test]
fn exit_codes_follow_the_error_contract() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("train.csv");
    let model = dir.path().join("model.qs3");
    write_labeled_csv(&data, &[-2.0, 0.0, 2.0], 0.4, 40, 2, 409);

    // theta * lambda = 0.5 violates the step-size precondition.
    let code = exit_code(bin().args([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--theta",
        "0.5",
        "--lambda",
        "1.0",
    ]));
    assert_eq!(code, 3);

    // Missing input file is a data error.
    let code = exit_code(bin().args([
        "train",
        "--data",
        dir.path().join("absent.csv").to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
    ]));
    assert_eq!(code, 2);

    // A corrupted model magic is a data error too.
    run_ok(bin().args([
        "train",
        "--data",
        data.to_str().unwrap(),
        "--model-out",
        model.to_str().unwrap(),
        "--n-labeled",
        "60",
        "--iters",
        "10",
        "--m",
        "8",
        "--batch",
        "4",
    ]));
    let mut bytes = std::fs::read(&model).unwrap();
    bytes[0] ^= 0xFF;
    let broken = dir.path().join("broken.qs3");
    std::fs::write(&broken, bytes).unwrap();
    let probes = dir.path().join("probes.csv");
    write_features_csv(&probes, &Array2::zeros((2, 2)));
    let code = exit_code(bin().args([
        "predict",
        "--model",
        broken.to_str().unwrap(),
        "--in",
        probes.to_str().unwrap(),
    ]));
    assert_eq!(code, 2);

    // Probe width that disagrees with the model dimension is a data error.
    let wide = dir.path().join("wide.csv");
    write_features_csv(&wide, &Array2::zeros((2, 5)));
    let code = exit_code(bin().args([
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--in",
        wide.to_str().unwrap(),
    ]));
    assert_eq!(code, 2);
}
