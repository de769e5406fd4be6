//! Model evaluation: rank-sum AUC, ordinal error metrics, scaling benchmark.

use ndarray::s;
use serde::Serialize;
use std::time::Instant;

use crate::data::{make_semi_split, OrdinalDataset, SemiSupervisedSplit};
use crate::error::{Error, Result};
use crate::model::RankModel;
use crate::trainer::{train, TrainConfig};

/// AUC via the rank-sum statistic, with midranks for tied scores.
///
/// Runs in `O(n log n)` and equals the pair-enumeration AUC that counts a
/// tied pair as one half.
pub fn auc_rank_sum(scores: &[f64], is_positive: &[bool]) -> Result<f64> {
    if scores.len() != is_positive.len() {
        return Err(Error::InvalidData(format!(
            "{} scores but {} indicators",
            scores.len(),
            is_positive.len()
        )));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidData("non-finite score".into()));
    }
    let p = is_positive.iter().filter(|&&b| b).count();
    let n = scores.len() - p;
    if p == 0 || n == 0 {
        return Err(Error::InvalidData(
            "AUC needs at least one positive and one negative".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("finite scores"));

    let mut rank_sum_pos = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // 1-based midrank of the tie group spanning sorted slots start..end.
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            if is_positive[idx] {
                rank_sum_pos += midrank;
            }
        }
        start = end;
    }

    let p_f = p as f64;
    Ok((rank_sum_pos - p_f * (p_f + 1.0) / 2.0) / (p_f * n as f64))
}

/// Quality summary of a model on a labeled dataset.
#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    /// Mean of the per-subproblem AUCs that could be computed.
    pub overall_auc: f64,
    /// One entry per threshold; `None` where the dataset has no rows on one
    /// side of the split.
    pub per_subproblem_auc: Vec<Option<f64>>,
    /// Mean absolute label distance.
    pub mae: f64,
    /// Fraction of rows whose predicted label is wrong.
    pub zero_one_error: f64,
    /// Training wall time in nanoseconds; zero when evaluation stands alone.
    pub train_ns: u64,
    /// Bytes held by the model's coefficient rows.
    pub peak_coeff_bytes: u64,
}

impl Metrics {
    pub fn with_train_ns(mut self, ns: u64) -> Self {
        self.train_ns = ns;
        self
    }
}

/// Scores a dataset and summarizes ranking and labeling quality.
///
/// Subproblems with rows on only one side of the cut are skipped with a
/// warning and reported as `None`; the overall AUC averages the rest.
pub fn evaluate_model(model: &RankModel, ds: &OrdinalDataset) -> Result<Metrics> {
    if ds.k() != model.k() {
        return Err(Error::InvalidData(format!(
            "dataset has {} classes but the model was trained with {}",
            ds.k(),
            model.k()
        )));
    }
    let scores = model.predict_scores(ds.features().view())?;
    let k = model.k();
    let mut per = Vec::with_capacity(k - 1);
    let mut present = Vec::new();
    for j in 1..k {
        let is_pos: Vec<bool> = ds.labels().iter().map(|&y| y > j).collect();
        let pos = is_pos.iter().filter(|&&b| b).count();
        if pos == 0 || pos == is_pos.len() {
            log::warn!("subproblem {j} has rows on only one side; skipping its AUC");
            per.push(None);
            continue;
        }
        let auc = auc_rank_sum(&scores, &is_pos)?;
        per.push(Some(auc));
        present.push(auc);
    }
    if present.is_empty() {
        return Err(Error::InvalidData(
            "no subproblem had rows on both sides; cannot evaluate".into(),
        ));
    }
    let overall = present.iter().sum::<f64>() / present.len() as f64;

    let predicted = model.predict_labels(ds.features().view())?;
    let n = ds.len() as f64;
    let mut abs_sum = 0.0;
    let mut wrong = 0usize;
    for (&hat, &y) in predicted.iter().zip(ds.labels()) {
        abs_sum += (hat as f64 - y as f64).abs();
        if hat != y {
            wrong += 1;
        }
    }

    Ok(Metrics {
        overall_auc: overall,
        per_subproblem_auc: per,
        mae: abs_sum / n,
        zero_one_error: wrong as f64 / n,
        train_ns: 0,
        peak_coeff_bytes: model.coeff_bytes(),
    })
}

/// One row of the scaling benchmark.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub n_u: usize,
    pub mean_train_ns: u64,
    pub peak_coeff_bytes: u64,
}

/// Times training at several unlabeled-pool sizes.
///
/// The labeled subset stays fixed; each pool size truncates the unlabeled
/// remainder, and the run is repeated with shifted seeds. Coefficient memory
/// is reported per run and does not depend on the pool size.
pub fn bench_scaling(
    ds: &OrdinalDataset,
    config: &TrainConfig,
    n_labeled: usize,
    unlabeled_sizes: &[usize],
    repeats: usize,
) -> Result<Vec<BenchRow>> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be at least 1".into()));
    }
    let base = make_semi_split(ds, n_labeled, config.master_seed)?;
    let mut rows = Vec::with_capacity(unlabeled_sizes.len());
    for &n_u in unlabeled_sizes {
        if n_u > base.n_unlabeled() {
            return Err(Error::InvalidConfig(format!(
                "requested {n_u} unlabeled rows but only {} are available",
                base.n_unlabeled()
            )));
        }
        let pool = base
            .unlabeled_features()
            .slice(s![..n_u, ..])
            .to_owned();
        let split = SemiSupervisedSplit::from_parts(base.labeled().clone(), pool, config.master_seed)?;
        let mut total_ns = 0u64;
        let mut peak = 0u64;
        for rep in 0..repeats {
            let cfg = TrainConfig {
                master_seed: config.master_seed.wrapping_add(rep as u64),
                ..config.clone()
            };
            let started = Instant::now();
            let model = train(&split, &cfg)?;
            total_ns += started.elapsed().as_nanos() as u64;
            peak = peak.max(model.coeff_bytes());
        }
        rows.push(BenchRow {
            n_u,
            mean_train_ns: total_ns / repeats as u64,
            peak_coeff_bytes: peak,
        });
    }
    Ok(rows)
}

/// Renders benchmark rows as CSV with a fixed header.
pub fn bench_rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n_u,mean_train_ns,peak_coeff_bytes\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            row.n_u, row.mean_train_ns, row.peak_coeff_bytes
        ));
    }
    out
}
