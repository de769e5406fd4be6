//! Command-line front end.
//!
//! Six subcommands cover the operator workflow: `discretize` bins a
//! regression target into ordinal labels, `train` fits and saves a model,
//! `predict` scores or labels new rows, `eval` reports metrics as JSON,
//! `grid-search` cross-validates hyperparameters, and `bench` times training
//! across unlabeled-pool sizes.
//!
//! Conventions shared by every subcommand:
//!
//! * exit codes: 0 success, 2 input problems, 3 configuration problems,
//!   4 numeric failures;
//! * the environment variable `QS3ORAO_SEED`, when set, overrides `--seed`;
//! * every JSON output carries `schema_version` and echoes the effective
//!   configuration, so a run can be reproduced from its output alone. When
//!   the primary artifact of a subcommand is written to a file the echo goes
//!   to stdout; when the artifact itself goes to stdout the echo moves to
//!   stderr.

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::data::{
    discretize_equal_frequency, load_dataset, load_features_csv, make_semi_split,
    normalize_min_max, DataFormat, OrdinalDataset, SemiSupervisedSplit,
};
use crate::error::{Error, Result};
use crate::eval::{bench_rows_to_csv, bench_scaling, evaluate_model};
use crate::model::RankModel;
use crate::trainer::{train, train_with_progress, TrainConfig};

const SCHEMA_VERSION: u32 = 1;
const SEED_ENV_VAR: &str = "QS3ORAO_SEED";
const FOLD_RETRIES: usize = 10_000;

#[derive(Parser)]
#[command(
    name = "qs3orao",
    version,
    about = "Semi-supervised ordinal AUC optimization with streamed random features"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bin a real-valued target column into equal-frequency ordinal labels.
    Discretize(DiscretizeArgs),
    /// Train a ranking model on a partially labeled dataset.
    Train(TrainArgs),
    /// Score or label feature rows with a saved model.
    Predict(PredictArgs),
    /// Evaluate a saved model on labeled data, reporting metrics as JSON.
    Eval(EvalArgs),
    /// Cross-validate hyperparameters over lambda, sigma, and gamma grids.
    GridSearch(GridSearchArgs),
    /// Time training across unlabeled-pool sizes and report a CSV table.
    Bench(BenchArgs),
}

#[derive(Args)]
struct DiscretizeArgs {
    /// Input CSV of numeric columns.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output CSV: feature columns in order, then the binned label.
    #[arg(long = "out")]
    output: PathBuf,
    /// Number of ordinal classes.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// 0-based index of the target column; defaults to the last column.
    #[arg(long)]
    target_col: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled dataset (CSV with the label last, or LIBSVM).
    #[arg(long)]
    data: PathBuf,
    /// Input format: csv or libsvm.
    #[arg(long)]
    format: Option<String>,
    /// Rows to keep labeled; the rest become the unlabeled pool.
    #[arg(long)]
    n_labeled: Option<usize>,
    /// Master seed; QS3ORAO_SEED overrides this flag.
    #[arg(long)]
    seed: Option<u64>,
    /// Regularization weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Step-size numerator; defaults keep theta * lambda = 1.5.
    #[arg(long)]
    theta: Option<f64>,
    /// Trade-off between labeled and unlabeled risk, in [0, 1].
    #[arg(long)]
    gamma: Option<f64>,
    /// Random features per iteration block.
    #[arg(long)]
    m: Option<usize>,
    /// Training iterations.
    #[arg(long)]
    iters: Option<usize>,
    /// Batch size per class and for the unlabeled draw.
    #[arg(long)]
    batch: Option<usize>,
    /// Kernel bandwidth.
    #[arg(long)]
    sigma: Option<f64>,
    /// Min-max normalize features before splitting.
    #[arg(long)]
    normalize: bool,
    /// Where to write the model file.
    #[arg(long)]
    model_out: PathBuf,
    /// Optional per-iteration progress CSV (i,eta,surrogate_risk,elapsed_ns).
    #[arg(long)]
    curve_out: Option<PathBuf>,
    /// TOML file supplying defaults for any flag not given.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    /// Saved model file.
    #[arg(long)]
    model: PathBuf,
    /// Feature CSV (no label column).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long = "out")]
    output: Option<PathBuf>,
    /// Emit raw ranking scores (default).
    #[arg(long, conflicts_with = "labels")]
    scores: bool,
    /// Emit class labels instead of scores.
    #[arg(long)]
    labels: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Saved model file.
    #[arg(long)]
    model: PathBuf,
    /// Labeled dataset to evaluate on.
    #[arg(long)]
    data: PathBuf,
    /// Input format: csv or libsvm.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output path for the metrics JSON; stdout when omitted.
    #[arg(long)]
    json_out: Option<PathBuf>,
}

#[derive(Args)]
struct GridSearchArgs {
    /// Labeled dataset (CSV with the label last, or LIBSVM).
    #[arg(long)]
    data: PathBuf,
    /// Input format: csv or libsvm.
    #[arg(long)]
    format: Option<String>,
    /// Rows to keep labeled; the rest become the shared unlabeled pool.
    #[arg(long)]
    n_labeled: Option<usize>,
    /// Master seed; QS3ORAO_SEED overrides this flag.
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-validation folds over the labeled rows.
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// Comma-separated lambda grid; default 2^-3..2^3.
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Comma-separated sigma grid; default 2^-3..2^3.
    #[arg(long)]
    sigma_grid: Option<String>,
    /// Comma-separated gamma grid; default 0,0.1,...,1.
    #[arg(long)]
    gamma_grid: Option<String>,
    /// Step-size numerator; when omitted each cell uses 1.5 / lambda.
    #[arg(long)]
    theta: Option<f64>,
    /// Random features per iteration block.
    #[arg(long)]
    m: Option<usize>,
    /// Training iterations per fold.
    #[arg(long)]
    iters: Option<usize>,
    /// Batch size per class and for the unlabeled draw.
    #[arg(long)]
    batch: Option<usize>,
    /// Concurrent grid cells.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Min-max normalize features before splitting.
    #[arg(long)]
    normalize: bool,
    /// Output path for the result JSON; stdout when omitted.
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// TOML file supplying defaults for any flag not given.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Labeled dataset (CSV with the label last, or LIBSVM).
    #[arg(long)]
    data: PathBuf,
    /// Input format: csv or libsvm.
    #[arg(long)]
    format: Option<String>,
    /// Fixed labeled-set size.
    #[arg(long)]
    n_labeled: Option<usize>,
    /// Master seed; QS3ORAO_SEED overrides this flag.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated unlabeled-pool sizes to time.
    #[arg(long)]
    unlabeled_sizes: String,
    /// Repetitions averaged per pool size.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Regularization weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Step-size numerator.
    #[arg(long)]
    theta: Option<f64>,
    /// Trade-off between labeled and unlabeled risk.
    #[arg(long)]
    gamma: Option<f64>,
    /// Random features per iteration block.
    #[arg(long)]
    m: Option<usize>,
    /// Training iterations per run.
    #[arg(long)]
    iters: Option<usize>,
    /// Batch size per class and for the unlabeled draw.
    #[arg(long)]
    batch: Option<usize>,
    /// Kernel bandwidth.
    #[arg(long)]
    sigma: Option<f64>,
    /// Output path for the CSV table; stdout when omitted.
    #[arg(long)]
    csv_out: Option<PathBuf>,
    /// TOML file supplying defaults for any flag not given.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Optional defaults loaded from a `--config` TOML file. Flags given on the
/// command line win over file values.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    format: Option<String>,
    n_labeled: Option<usize>,
    seed: Option<u64>,
    lambda: Option<f64>,
    theta: Option<f64>,
    gamma: Option<f64>,
    m: Option<usize>,
    iters: Option<usize>,
    batch: Option<usize>,
    sigma: Option<f64>,
    normalize: Option<bool>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
    }
}

/// Parses arguments and runs one subcommand, returning the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Discretize(args) => cmd_discretize(&args),
        Command::Train(args) => cmd_train(&args),
        Command::Predict(args) => cmd_predict(&args),
        Command::Eval(args) => cmd_eval(&args),
        Command::GridSearch(args) => cmd_grid_search(&args),
        Command::Bench(args) => cmd_bench(&args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Seed precedence: environment variable, then flag, then config file,
/// then zero.
fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64> {
    if let Ok(raw) = std::env::var(SEED_ENV_VAR) {
        return raw.trim().parse().map_err(|_| {
            Error::InvalidConfig(format!(
                "{SEED_ENV_VAR} must be an unsigned integer, got {raw:?}"
            ))
        });
    }
    Ok(flag.or(file).unwrap_or(0))
}

fn parse_format(flag: Option<&str>, file: Option<&str>) -> Result<DataFormat> {
    flag.or(file).unwrap_or("csv").parse()
}

fn parse_f64_list(raw: &str, flag: &str) -> Result<Vec<f64>> {
    let vals: Vec<f64> = raw
        .split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("{flag}: {tok:?} is not a number"))
            })
        })
        .collect::<Result<_>>()?;
    if vals.is_empty() {
        return Err(Error::InvalidConfig(format!("{flag}: empty list")));
    }
    Ok(vals)
}

fn parse_usize_list(raw: &str, flag: &str) -> Result<Vec<usize>> {
    let vals: Vec<usize> = raw
        .split(',')
        .map(|tok| {
            tok.trim().parse::<usize>().map_err(|_| {
                Error::InvalidConfig(format!("{flag}: {tok:?} is not a count"))
            })
        })
        .collect::<Result<_>>()?;
    if vals.is_empty() {
        return Err(Error::InvalidConfig(format!("{flag}: empty list")));
    }
    Ok(vals)
}

/// Writes `text` to `path`, or to stdout when no path is given. Returns
/// whether a file was written (controls where the config echo goes).
fn write_artifact(path: Option<&Path>, text: &str) -> Result<bool> {
    match path {
        Some(path) => {
            std::fs::write(path, text)?;
            Ok(true)
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(false)
        }
    }
}

fn emit_echo(echo: &serde_json::Value, to_stdout: bool) -> Result<()> {
    let text = serde_json::to_string_pretty(echo).expect("serializable echo");
    if to_stdout {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    Ok(())
}

fn cmd_discretize(args: &DiscretizeArgs) -> Result<()> {
    let features = load_features_csv(&args.input)?;
    if features.ncols() == 0 || features.nrows() == 0 {
        return Err(Error::InvalidData("input file has no rows".into()));
    }
    let target_col = args.target_col.unwrap_or(features.ncols() - 1);
    if target_col >= features.ncols() {
        return Err(Error::InvalidConfig(format!(
            "target column {target_col} out of range; input has {} columns",
            features.ncols()
        )));
    }
    let targets: Vec<f64> = features.column(target_col).to_vec();
    let labels = discretize_equal_frequency(&targets, args.k)?;

    let mut out = String::new();
    for (r, row) in features.rows().into_iter().enumerate() {
        let mut first = true;
        for (c, &v) in row.iter().enumerate() {
            if c == target_col {
                continue;
            }
            if !first {
                out.push(',');
            }
            out.push_str(&v.to_string());
            first = false;
        }
        if !first {
            out.push(',');
        }
        out.push_str(&labels[r].to_string());
        out.push('\n');
    }
    std::fs::write(&args.output, out)?;

    let mut bin_counts = vec![0usize; args.k];
    for &l in &labels {
        bin_counts[l - 1] += 1;
    }
    let echo = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "discretize",
        "config": {
            "in": args.input.display().to_string(),
            "out": args.output.display().to_string(),
            "k": args.k,
            "target_col": target_col,
        },
        "result": {
            "rows": labels.len(),
            "bin_counts": bin_counts,
        },
    });
    emit_echo(&echo, true)
}

struct ResolvedTrain {
    config: TrainConfig,
    format: DataFormat,
    n_labeled: usize,
    normalize: bool,
}

#[allow(clippy::too_many_arguments)]
fn resolve_train_knobs(
    file: &FileConfig,
    format: Option<&str>,
    n_labeled: Option<usize>,
    seed: Option<u64>,
    lambda: Option<f64>,
    theta: Option<f64>,
    gamma: Option<f64>,
    m: Option<usize>,
    iters: Option<usize>,
    batch: Option<usize>,
    sigma: Option<f64>,
    normalize: bool,
) -> Result<ResolvedTrain> {
    let defaults = TrainConfig::default();
    let lambda = lambda.or(file.lambda).unwrap_or(defaults.lambda);
    // The default theta tracks lambda so theta * lambda stays at 1.5.
    let theta = theta.or(file.theta).unwrap_or(1.5 / lambda);
    let gamma = gamma.or(file.gamma).unwrap_or(defaults.gamma[0]);
    let config = TrainConfig {
        lambda,
        theta,
        gamma: vec![gamma],
        m: m.or(file.m).unwrap_or(defaults.m),
        t_max: iters.or(file.iters).unwrap_or(defaults.t_max),
        batch: batch.or(file.batch).unwrap_or(defaults.batch),
        sigma: sigma.or(file.sigma).unwrap_or(defaults.sigma),
        master_seed: resolve_seed(seed, file.seed)?,
    };
    config.validate()?;
    Ok(ResolvedTrain {
        config,
        format: parse_format(format, file.format.as_deref())?,
        n_labeled: n_labeled.or(file.n_labeled).unwrap_or(500),
        normalize: normalize || file.normalize.unwrap_or(false),
    })
}

fn train_config_json(r: &ResolvedTrain, data: &Path) -> serde_json::Value {
    json!({
        "data": data.display().to_string(),
        "format": format!("{:?}", r.format).to_lowercase(),
        "n_labeled": r.n_labeled,
        "seed": r.config.master_seed,
        "lambda": r.config.lambda,
        "theta": r.config.theta,
        "gamma": r.config.gamma[0],
        "m": r.config.m,
        "iters": r.config.t_max,
        "batch": r.config.batch,
        "sigma": r.config.sigma,
        "normalize": r.normalize,
    })
}

fn load_split(data: &Path, r: &ResolvedTrain) -> Result<(OrdinalDataset, SemiSupervisedSplit)> {
    let mut ds = load_dataset(data, r.format)?;
    if r.normalize {
        ds = normalize_min_max(&ds);
    }
    let split = make_semi_split(&ds, r.n_labeled, r.config.master_seed)?;
    Ok((ds, split))
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let resolved = resolve_train_knobs(
        &file,
        args.format.as_deref(),
        args.n_labeled,
        args.seed,
        args.lambda,
        args.theta,
        args.gamma,
        args.m,
        args.iters,
        args.batch,
        args.sigma,
        args.normalize,
    )?;
    let (_ds, split) = load_split(&args.data, &resolved)?;

    let mut curve = String::from("i,eta,surrogate_risk,elapsed_ns\n");
    let want_curve = args.curve_out.is_some();
    let started = Instant::now();
    let model = train_with_progress(&split, &resolved.config, &mut |rec| {
        if want_curve {
            curve.push_str(&format!(
                "{},{},{},{}\n",
                rec.i, rec.eta, rec.surrogate_risk, rec.elapsed_ns
            ));
        }
    })?;
    let train_ns = started.elapsed().as_nanos() as u64;
    model.save(&args.model_out)?;
    if let Some(curve_out) = &args.curve_out {
        std::fs::write(curve_out, curve)?;
    }

    let echo = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "train",
        "config": train_config_json(&resolved, &args.data),
        "result": {
            "model_out": args.model_out.display().to_string(),
            "curve_out": args.curve_out.as_ref().map(|p| p.display().to_string()),
            "n_labeled": split.labeled().len(),
            "n_unlabeled": split.n_unlabeled(),
            "k": split.k(),
            "train_ns": train_ns,
            "coeff_bytes": model.coeff_bytes(),
        },
    });
    emit_echo(&echo, true)
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let model = RankModel::load(&args.model)?;
    let features = load_features_csv(&args.input)?;
    if features.ncols() != model.kernel().d() {
        return Err(Error::InvalidData(format!(
            "input rows have {} features but the model expects {}",
            features.ncols(),
            model.kernel().d()
        )));
    }
    let emit_labels = args.labels && !args.scores;
    let mut out = String::new();
    if emit_labels {
        for label in model.predict_labels(features.view())? {
            out.push_str(&label.to_string());
            out.push('\n');
        }
    } else {
        for score in model.predict_scores(features.view())? {
            out.push_str(&score.to_string());
            out.push('\n');
        }
    }
    let to_file = write_artifact(args.output.as_deref(), &out)?;

    let echo = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "predict",
        "config": {
            "model": args.model.display().to_string(),
            "in": args.input.display().to_string(),
            "out": args.output.as_ref().map(|p| p.display().to_string()),
            "mode": if emit_labels { "labels" } else { "scores" },
        },
        "result": { "rows": features.nrows() },
    });
    emit_echo(&echo, to_file)
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let model = RankModel::load(&args.model)?;
    let format: DataFormat = args.format.parse()?;
    let ds = load_dataset(&args.data, format)?;
    let metrics = evaluate_model(&model, &ds)?;

    let echo = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "eval",
        "config": {
            "model": args.model.display().to_string(),
            "data": args.data.display().to_string(),
            "format": args.format,
            "json_out": args.json_out.as_ref().map(|p| p.display().to_string()),
        },
        "metrics": metrics,
    });
    let text = serde_json::to_string_pretty(&echo).expect("serializable metrics");
    let to_file = write_artifact(args.json_out.as_deref(), &format!("{text}\n"))?;
    if to_file {
        emit_echo(&echo, true)?;
    }
    Ok(())
}

fn default_log_grid() -> Vec<f64> {
    (-3..=3).map(|e| (e as f64).exp2()).collect()
}

fn default_gamma_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Splits labeled row indices into `folds` validation sets such that every
/// fold's training complement covers all classes and every validation set
/// sees at least two classes. Redraws from the seed stream when a cut
/// violates that, so class-starved folds are resampled rather than fatal.
fn cv_folds(labeled: &OrdinalDataset, folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let n = labeled.len();
    if folds < 2 {
        return Err(Error::InvalidConfig("need at least 2 folds".into()));
    }
    if n < 2 * folds {
        return Err(Error::InvalidConfig(format!(
            "{n} labeled rows cannot fill {folds} folds"
        )));
    }
    let k = labeled.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..FOLD_RETRIES {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let base = n / folds;
        let extra = n % folds;
        let mut cuts = Vec::with_capacity(folds);
        let mut at = 0;
        for f in 0..folds {
            let len = base + usize::from(f < extra);
            cuts.push(perm[at..at + len].to_vec());
            at += len;
        }
        for val_rows in &cuts {
            let mut val_classes = vec![false; k + 1];
            for &r in val_rows {
                val_classes[labeled.labels()[r]] = true;
            }
            if val_classes.iter().filter(|&&b| b).count() < 2 {
                continue 'attempt;
            }
            let mut train_classes = vec![0usize; k + 1];
            let in_val: std::collections::HashSet<usize> = val_rows.iter().copied().collect();
            for r in 0..n {
                if !in_val.contains(&r) {
                    train_classes[labeled.labels()[r]] += 1;
                }
            }
            if (1..=k).any(|c| train_classes[c] == 0) {
                continue 'attempt;
            }
        }
        return Ok(cuts);
    }
    Err(Error::InvalidData(format!(
        "could not draw {folds} folds keeping every class represented"
    )))
}

#[derive(Debug, Clone, serde::Serialize)]
struct GridCell {
    lambda: f64,
    sigma: f64,
    gamma: f64,
    mean_auc: f64,
    fold_aucs: Vec<f64>,
}

fn evaluate_grid_cell(
    split: &SemiSupervisedSplit,
    folds: &[Vec<usize>],
    base: &TrainConfig,
    lambda: f64,
    sigma: f64,
    gamma: f64,
    theta: Option<f64>,
) -> Result<GridCell> {
    let labeled = split.labeled();
    let k = labeled.k();
    let mut fold_aucs = Vec::with_capacity(folds.len());
    for (f, val_rows) in folds.iter().enumerate() {
        let in_val: std::collections::HashSet<usize> = val_rows.iter().copied().collect();
        let train_rows: Vec<usize> = (0..labeled.len()).filter(|r| !in_val.contains(r)).collect();
        let train_ds = labeled.subset(&train_rows)?;
        let fold_split = SemiSupervisedSplit::from_parts(
            train_ds,
            split.unlabeled_features().clone(),
            split.split_seed(),
        )?;
        let config = TrainConfig {
            lambda,
            theta: theta.unwrap_or(1.5 / lambda),
            gamma: vec![gamma],
            sigma,
            master_seed: base.master_seed.wrapping_add(f as u64),
            ..base.clone()
        };
        config.validate()?;
        let model = train(&fold_split, &config)?;

        let val_ds = {
            let feats = labeled.features().select(ndarray::Axis(0), val_rows);
            let labels: Vec<usize> = val_rows.iter().map(|&r| labeled.labels()[r]).collect();
            OrdinalDataset::with_k(feats, labels, k)?
        };
        let metrics = evaluate_model(&model, &val_ds)?;
        fold_aucs.push(metrics.overall_auc);
    }
    let mean_auc = fold_aucs.iter().sum::<f64>() / fold_aucs.len() as f64;
    Ok(GridCell {
        lambda,
        sigma,
        gamma,
        mean_auc,
        fold_aucs,
    })
}

fn cmd_grid_search(args: &GridSearchArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let resolved = resolve_train_knobs(
        &file,
        args.format.as_deref(),
        args.n_labeled,
        args.seed,
        None,
        // Theta is resolved per cell from each lambda.
        None,
        None,
        args.m,
        args.iters,
        args.batch,
        None,
        args.normalize,
    )?;
    let lambda_grid = match &args.lambda_grid {
        Some(raw) => parse_f64_list(raw, "--lambda-grid")?,
        None => default_log_grid(),
    };
    let sigma_grid = match &args.sigma_grid {
        Some(raw) => parse_f64_list(raw, "--sigma-grid")?,
        None => default_log_grid(),
    };
    let gamma_grid = match &args.gamma_grid {
        Some(raw) => parse_f64_list(raw, "--gamma-grid")?,
        None => default_gamma_grid(),
    };
    if args.jobs == 0 {
        return Err(Error::InvalidConfig("--jobs must be at least 1".into()));
    }

    let (_ds, split) = load_split(&args.data, &resolved)?;
    let folds = cv_folds(split.labeled(), args.folds, resolved.config.master_seed)?;

    let mut cells = Vec::new();
    for &lambda in &lambda_grid {
        for &sigma in &sigma_grid {
            for &gamma in &gamma_grid {
                cells.push((lambda, sigma, gamma));
            }
        }
    }
    let base = resolved.config.clone();
    let theta = args.theta.or(file.theta);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("--jobs: {e}")))?;
    let results: Vec<Result<GridCell>> = pool.install(|| {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|&(lambda, sigma, gamma)| {
                evaluate_grid_cell(&split, &folds, &base, lambda, sigma, gamma, theta)
            })
            .collect()
    });
    let table: Vec<GridCell> = results.into_iter().collect::<Result<_>>()?;

    let mut best = 0usize;
    for i in 1..table.len() {
        let better = table[i].mean_auc > table[best].mean_auc
            || (table[i].mean_auc == table[best].mean_auc
                && table[i].lambda > table[best].lambda);
        if better {
            best = i;
        }
    }

    let echo = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "grid-search",
        "config": {
            "data": args.data.display().to_string(),
            "format": format!("{:?}", resolved.format).to_lowercase(),
            "n_labeled": resolved.n_labeled,
            "seed": resolved.config.master_seed,
            "folds": args.folds,
            "lambda_grid": lambda_grid,
            "sigma_grid": sigma_grid,
            "gamma_grid": gamma_grid,
            "theta": theta,
            "m": resolved.config.m,
            "iters": resolved.config.t_max,
            "batch": resolved.config.batch,
            "jobs": args.jobs,
            "normalize": resolved.normalize,
        },
        "best": table[best],
        "table": table,
    });
    let text = serde_json::to_string_pretty(&echo).expect("serializable grid");
    let to_file = write_artifact(args.json_out.as_deref(), &format!("{text}\n"))?;
    if to_file {
        emit_echo(&echo, true)?;
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let file = FileConfig::load(args.config.as_deref())?;
    let resolved = resolve_train_knobs(
        &file,
        args.format.as_deref(),
        args.n_labeled,
        args.seed,
        args.lambda,
        args.theta,
        args.gamma,
        args.m,
        args.iters,
        args.batch,
        args.sigma,
        false,
    )?;
    let sizes = parse_usize_list(&args.unlabeled_sizes, "--unlabeled-sizes")?;
    let ds = load_dataset(&args.data, resolved.format)?;
    let rows = bench_scaling(&ds, &resolved.config, resolved.n_labeled, &sizes, args.repeats)?;
    let csv = bench_rows_to_csv(&rows);
    let to_file = write_artifact(args.csv_out.as_deref(), &csv)?;

    let echo = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "bench",
        "config": {
            "data": args.data.display().to_string(),
            "format": format!("{:?}", resolved.format).to_lowercase(),
            "n_labeled": resolved.n_labeled,
            "seed": resolved.config.master_seed,
            "unlabeled_sizes": sizes,
            "repeats": args.repeats,
            "lambda": resolved.config.lambda,
            "theta": resolved.config.theta,
            "gamma": resolved.config.gamma[0],
            "m": resolved.config.m,
            "iters": resolved.config.t_max,
            "batch": resolved.config.batch,
            "sigma": resolved.config.sigma,
            "csv_out": args.csv_out.as_ref().map(|p| p.display().to_string()),
        },
        "result": { "rows": rows },
    });
    emit_echo(&echo, to_file)
}
