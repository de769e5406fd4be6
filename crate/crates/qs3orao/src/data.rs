//! Dataset loading, preprocessing, and semi-supervised splitting.
//!
//! An ordinal problem with k classes is decomposed into k-1 binary
//! subproblems: subproblem j treats classes above j as positive and the rest
//! as negative. This module owns the dataset containers, the CSV / LIBSVM
//! readers, min-max normalization, equal-frequency discretization of a
//! regression target, and the labeled/unlabeled split used for training.

use ndarray::{Array2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Input file formats understood by [`load_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// Comma-separated numeric values, no header, last column is the label.
    Csv,
    /// `label idx:value ...` with 1-based feature indices.
    Libsvm,
}

impl std::str::FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(DataFormat::Csv),
            "libsvm" => Ok(DataFormat::Libsvm),
            other => Err(Error::InvalidConfig(format!(
                "unknown data format {other:?} (expected \"csv\" or \"libsvm\")"
            ))),
        }
    }
}

/// A fully labeled ordinal dataset with labels in `1..=k`.
#[derive(Debug, Clone)]
pub struct OrdinalDataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    k: usize,
    priors: Vec<f64>,
}

impl OrdinalDataset {
    /// Builds a dataset and validates it: labels must lie in `1..=max`,
    /// and every class up to the maximum label must be present.
    pub fn new(features: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidData("dataset has no rows".into()));
        }
        let k = *labels.iter().max().expect("non-empty");
        let ds = Self::with_k(features, labels, k)?;
        for class in 1..=k {
            if ds.class_count(class) == 0 {
                return Err(Error::InvalidData(format!(
                    "class {class} has no instances (labels go up to {k})"
                )));
            }
        }
        Ok(ds)
    }

    /// Builds a dataset against an externally fixed class count `k`.
    ///
    /// Unlike [`OrdinalDataset::new`] this allows empty classes, which is
    /// needed for evaluation subsets (cross-validation folds, test splits)
    /// of a larger dataset.
    pub fn with_k(features: Array2<f64>, labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidData("dataset has no rows".into()));
        }
        if features.nrows() != labels.len() {
            return Err(Error::InvalidData(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if k == 0 {
            return Err(Error::InvalidData("class count must be at least 1".into()));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y == 0 || y > k) {
            return Err(Error::InvalidData(format!(
                "label {bad} outside 1..={k}"
            )));
        }
        let n = labels.len() as f64;
        let priors = (1..=k)
            .map(|c| labels.iter().filter(|&&y| y == c).count() as f64 / n)
            .collect();
        Ok(Self { features, labels, k, priors })
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Feature dimension.
    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    /// Number of classes.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Empirical class priors, index 0 holding class 1.
    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn class_count(&self, class: usize) -> usize {
        self.labels.iter().filter(|&&y| y == class).count()
    }

    /// Rows belonging to `class`, in row order.
    pub fn class_rows(&self, class: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    /// Returns the dataset restricted to `rows` (indices into this dataset),
    /// keeping the same class count.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let features = self.features.select(Axis(0), rows);
        let labels = rows.iter().map(|&i| self.labels[i]).collect();
        Self::with_k(features, labels, self.k)
    }
}

/// Reads a dataset from disk. See [`DataFormat`] for the two layouts.
pub fn load_dataset(path: &std::path::Path, format: DataFormat) -> Result<OrdinalDataset> {
    let text = std::fs::read_to_string(path)?;
    let (features, labels) = match format {
        DataFormat::Csv => parse_csv_labeled(&text)?,
        DataFormat::Libsvm => parse_libsvm(&text)?,
    };
    OrdinalDataset::new(features, labels)
}

/// Reads a CSV file in which every column is a feature (no label column).
pub fn load_features_csv(path: &std::path::Path) -> Result<Array2<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut row = Vec::new();
        for field in line.split(',') {
            row.push(parse_float_field(field, lineno)?);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidData("file has no data rows".into()));
    }
    rows_to_matrix(rows)
}

fn parse_csv_labeled(text: &str) -> Result<(Array2<f64>, Vec<usize>)> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 2 {
            return Err(Error::Parse {
                line: lineno,
                msg: "need at least one feature column and a label column".into(),
            });
        }
        let (label_field, feature_fields) = fields.split_last().expect("len >= 2");
        let mut row = Vec::with_capacity(feature_fields.len());
        for field in feature_fields {
            row.push(parse_float_field(field, lineno)?);
        }
        labels.push(parse_label_field(label_field, lineno)?);
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {} fields, found {}", first.len() + 1, row.len() + 1),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidData("file has no data rows".into()));
    }
    Ok((rows_to_matrix(rows)?, labels))
}

fn parse_libsvm(text: &str) -> Result<(Array2<f64>, Vec<usize>)> {
    let mut sparse: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut dim = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line");
        labels.push(parse_label_field(label_tok, lineno)?);
        let mut row = Vec::new();
        for tok in tokens {
            let (i_str, v_str) = tok.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected index:value, found {tok:?}"),
            })?;
            let i: usize = i_str.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad feature index {i_str:?}"),
            })?;
            if i == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "feature indices are 1-based".into(),
                });
            }
            let v = parse_float_field(v_str, lineno)?;
            dim = dim.max(i);
            row.push((i - 1, v));
        }
        sparse.push(row);
    }
    if sparse.is_empty() {
        return Err(Error::InvalidData("file has no data rows".into()));
    }
    if dim == 0 {
        return Err(Error::InvalidData("no feature entries in file".into()));
    }
    let mut features = Array2::zeros((sparse.len(), dim));
    for (r, row) in sparse.iter().enumerate() {
        for &(c, v) in row {
            features[[r, c]] = v;
        }
    }
    Ok((features, labels))
}

fn parse_float_field(field: &str, lineno: usize) -> Result<f64> {
    let trimmed = field.trim();
    trimmed.parse::<f64>().map_err(|_| Error::Parse {
        line: lineno,
        msg: format!("bad numeric field {trimmed:?}"),
    })
}

fn parse_label_field(field: &str, lineno: usize) -> Result<usize> {
    let trimmed = field.trim();
    let value: i64 = trimmed.parse().map_err(|_| Error::Parse {
        line: lineno,
        msg: format!("bad label {trimmed:?} (labels are integers)"),
    })?;
    if value < 1 {
        return Err(Error::InvalidData(format!(
            "label {value} at line {lineno}: labels must be >= 1"
        )));
    }
    Ok(value as usize)
}

fn rows_to_matrix(rows: Vec<Vec<f64>>) -> Result<Array2<f64>> {
    let d = rows[0].len();
    if d == 0 {
        return Err(Error::InvalidData("no feature columns".into()));
    }
    let n = rows.len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Array2::from_shape_vec((n, d), flat)
        .map_err(|e| Error::InvalidData(format!("ragged feature matrix: {e}")))
}

/// Rescales every feature column onto `[0, 1]`. Constant columns map to 0.
pub fn normalize_min_max(ds: &OrdinalDataset) -> OrdinalDataset {
    let mut features = ds.features.clone();
    for mut col in features.axis_iter_mut(Axis(1)) {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        if span > 0.0 {
            col.mapv_inplace(|v| (v - lo) / span);
        } else {
            col.fill(0.0);
        }
    }
    OrdinalDataset {
        features,
        labels: ds.labels.clone(),
        k: ds.k,
        priors: ds.priors.clone(),
    }
}

/// Bins a continuous target into `k` ordinal labels of near-equal frequency.
///
/// Rows are ranked by `(value, original index)` so ties resolve stably; the
/// first `n mod k` bins take one extra row, making bin sizes differ by at
/// most one. Returns a label in `1..=k` per input position.
pub fn discretize_equal_frequency(values: &[f64], k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 bins, got {k}"
        )));
    }
    let n = values.len();
    if k > n {
        return Err(Error::InvalidConfig(format!(
            "cannot split {n} rows into {k} bins"
        )));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidData(format!(
            "non-finite target value {bad}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("finite values")
            .then(a.cmp(&b))
    });
    let base = n / k;
    let extra = n % k;
    let mut labels = vec![0usize; n];
    let mut pos = 0usize;
    for bin in 1..=k {
        let size = base + usize::from(bin <= extra);
        for &row in &order[pos..pos + size] {
            labels[row] = bin;
        }
        pos += size;
    }
    Ok(labels)
}

/// A labeled core plus an unlabeled pool drawn from one source dataset.
#[derive(Debug, Clone)]
pub struct SemiSupervisedSplit {
    labeled: OrdinalDataset,
    unlabeled_features: Array2<f64>,
    labeled_indices: Vec<usize>,
    unlabeled_indices: Vec<usize>,
    split_seed: u64,
}

impl SemiSupervisedSplit {
    /// Assembles a split from parts already separated by the caller
    /// (cross-validation folds build these directly).
    pub fn from_parts(
        labeled: OrdinalDataset,
        unlabeled_features: Array2<f64>,
        split_seed: u64,
    ) -> Result<Self> {
        if unlabeled_features.nrows() > 0 && unlabeled_features.ncols() != labeled.dim() {
            return Err(Error::InvalidData(format!(
                "labeled rows have {} features, unlabeled rows have {}",
                labeled.dim(),
                unlabeled_features.ncols()
            )));
        }
        let n_l = labeled.len();
        let n_u = unlabeled_features.nrows();
        Ok(Self {
            labeled,
            unlabeled_features,
            labeled_indices: (0..n_l).collect(),
            unlabeled_indices: (n_l..n_l + n_u).collect(),
            split_seed,
        })
    }

    pub fn labeled(&self) -> &OrdinalDataset {
        &self.labeled
    }

    pub fn unlabeled_features(&self) -> &Array2<f64> {
        &self.unlabeled_features
    }

    pub fn n_unlabeled(&self) -> usize {
        self.unlabeled_features.nrows()
    }

    /// Row numbers of the source dataset that became labeled, ascending.
    pub fn labeled_indices(&self) -> &[usize] {
        &self.labeled_indices
    }

    /// Row numbers of the source dataset that became unlabeled, ascending.
    pub fn unlabeled_indices(&self) -> &[usize] {
        &self.unlabeled_indices
    }

    pub fn split_seed(&self) -> u64 {
        self.split_seed
    }

    pub fn dim(&self) -> usize {
        self.labeled.dim()
    }

    pub fn k(&self) -> usize {
        self.labeled.k()
    }
}

const SPLIT_RETRIES: usize = 10_000;

/// Draws `n_labeled` rows uniformly without replacement to keep as labeled
/// and strips the labels from the rest.
///
/// The draw is retried within the same seeded stream until every class keeps
/// at least one labeled instance, so the labeled core is always a valid
/// ordinal dataset. Fails if `n_labeled < k`, if `n_labeled` exceeds the
/// dataset, or if the retry budget is exhausted.
pub fn make_semi_split(
    ds: &OrdinalDataset,
    n_labeled: usize,
    seed: u64,
) -> Result<SemiSupervisedSplit> {
    let n = ds.len();
    let k = ds.k();
    if n_labeled < k {
        return Err(Error::InvalidConfig(format!(
            "n_labeled = {n_labeled} cannot cover {k} classes"
        )));
    }
    if n_labeled > n {
        return Err(Error::InvalidConfig(format!(
            "n_labeled = {n_labeled} exceeds dataset size {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Option<Vec<usize>> = None;
    for _ in 0..SPLIT_RETRIES {
        let mut picks = rand::seq::index::sample(&mut rng, n, n_labeled).into_vec();
        picks.sort_unstable();
        let mut seen = vec![false; k + 1];
        for &i in &picks {
            seen[ds.labels()[i]] = true;
        }
        if (1..=k).all(|c| seen[c]) {
            chosen = Some(picks);
            break;
        }
    }
    let labeled_indices = chosen.ok_or_else(|| {
        Error::InvalidData(format!(
            "could not cover all {k} classes with {n_labeled} labeled rows after {SPLIT_RETRIES} tries"
        ))
    })?;
    let mut is_labeled = vec![false; n];
    for &i in &labeled_indices {
        is_labeled[i] = true;
    }
    let unlabeled_indices: Vec<usize> = (0..n).filter(|&i| !is_labeled[i]).collect();
    let labeled = ds.subset(&labeled_indices)?;
    let unlabeled_features = ds.features.select(Axis(0), &unlabeled_indices);
    Ok(SemiSupervisedSplit {
        labeled,
        unlabeled_features,
        labeled_indices,
        unlabeled_indices,
        split_seed: seed,
    })
}

/// One binary subproblem of the ordinal decomposition.
#[derive(Debug, Clone)]
pub struct SubproblemView {
    /// Subproblem index in `1..=k-1`.
    pub j: usize,
    /// Labeled rows with `label > j`.
    pub positive_rows: Vec<usize>,
    /// Labeled rows with `label <= j`.
    pub negative_rows: Vec<usize>,
    /// Fraction of labeled rows that are positive.
    pub pi_hat: f64,
}

/// Builds the view for subproblem `j` (positives are classes above `j`).
pub fn subproblem_view(split: &SemiSupervisedSplit, j: usize) -> Result<SubproblemView> {
    let k = split.k();
    if j == 0 || j >= k {
        return Err(Error::InvalidConfig(format!(
            "subproblem index {j} outside 1..={}",
            k - 1
        )));
    }
    let labels = split.labeled().labels();
    let positive_rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] > j).collect();
    let negative_rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] <= j).collect();
    let pi_hat = positive_rows.len() as f64 / labels.len() as f64;
    Ok(SubproblemView { j, positive_rows, negative_rows, pi_hat })
}

/// Builds all `k-1` subproblem views in order.
pub fn all_subproblem_views(split: &SemiSupervisedSplit) -> Result<Vec<SubproblemView>> {
    (1..split.k()).map(|j| subproblem_view(split, j)).collect()
}

/// Synthesizes a k-class ordinal dataset from Gaussian clusters.
///
/// Class `c` places its signal on coordinate 0 at `means[c-1]` with noise
/// `noise`; remaining coordinates are pure `N(0, noise^2)` distractors. Rows
/// are laid out class by class, `per_class` rows each.
pub fn gaussian_ordinal(
    means: &[f64],
    noise: f64,
    per_class: usize,
    d: usize,
    seed: u64,
) -> Result<OrdinalDataset> {
    if means.len() < 2 {
        return Err(Error::InvalidConfig("need at least 2 class means".into()));
    }
    if per_class == 0 || d == 0 {
        return Err(Error::InvalidConfig(
            "per_class and d must be positive".into(),
        ));
    }
    if !(noise.is_finite() && noise > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "noise must be positive and finite, got {noise}"
        )));
    }
    let k = means.len();
    let n = k * per_class;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = Normal::new(0.0, noise).expect("validated noise");
    let mut features = Array2::zeros((n, d));
    let mut labels = Vec::with_capacity(n);
    for (c, &mean) in means.iter().enumerate() {
        for r in 0..per_class {
            let row = c * per_class + r;
            features[[row, 0]] = mean + gauss.sample(&mut rng);
            for col in 1..d {
                features[[row, col]] = gauss.sample(&mut rng);
            }
            labels.push(c + 1);
        }
    }
    OrdinalDataset::new(features, labels)
}
