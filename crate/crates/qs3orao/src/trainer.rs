//! Streaming pairwise-ranking trainer.
//!
//! Each iteration draws one small batch per class plus one shared unlabeled
//! batch, scores the batch under the current model by regenerating every
//! earlier frequency block from its seed, and appends one new coefficient
//! row. The update for iteration `i` with step `eta_i = theta / i` is
//!
//! * scale all earlier rows by `1 - eta_i * lambda`, then
//! * push `alpha_i`, the batch estimate of minus `eta_i` times the data
//!   term of the functional gradient, expressed in the iteration-`i`
//!   random-feature basis.
//!
//! Memory therefore grows by one `2m` row per iteration no matter how much
//! unlabeled data is streamed through, and a run is reproducible from the
//! master seed alone.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

use crate::data::SemiSupervisedSplit;
use crate::error::{Error, Result};
use crate::features::{feature_map, iteration_seed, score_points, FeatureStream, KernelSpec};
use crate::model::RankModel;
use crate::risk::{auc_risk_nu, auc_risk_pn, auc_risk_pu, risk_pnu, LossKind};
use crate::thresholds::fit_thresholds;

/// Hyperparameters for one training run.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Regularization weight; must be positive.
    pub lambda: f64,
    /// Step-size numerator, giving `eta_i = theta / i`.
    pub theta: f64,
    /// Mixing weight between the labeled-pair risk and the recovered
    /// unlabeled form. One shared value, or one value per subproblem.
    pub gamma: Vec<f64>,
    /// Random features per iteration block (each block is `2m` wide).
    pub m: usize,
    /// Number of iterations, equal to the number of coefficient rows.
    pub t_max: usize,
    /// Rows drawn per class and per unlabeled batch each iteration.
    pub batch: usize,
    /// Kernel bandwidth in `exp(-sigma * ||x - y||^2)`.
    pub sigma: f64,
    /// Seed from which every random choice in the run derives.
    pub master_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            theta: 1.5,
            gamma: vec![0.5],
            m: 64,
            t_max: 300,
            batch: 16,
            sigma: 1.0,
            master_seed: 0,
        }
    }
}

impl TrainConfig {
    /// Checks field ranges and the step-size product constraint.
    ///
    /// The decay telescoping behind the convergence guarantee needs
    /// `theta * lambda` to lie in `(1, 2)` or to be a positive integer;
    /// anything else is rejected up front.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("theta", self.theta),
            ("sigma", self.sigma),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if self.t_max == 0 {
            return Err(Error::InvalidConfig("t_max must be at least 1".into()));
        }
        if self.batch == 0 {
            return Err(Error::InvalidConfig("batch must be at least 1".into()));
        }
        if self.gamma.is_empty() {
            return Err(Error::InvalidConfig("gamma must not be empty".into()));
        }
        for &g in &self.gamma {
            if !g.is_finite() || !(0.0..=1.0).contains(&g) {
                return Err(Error::InvalidConfig(format!(
                    "gamma must lie in [0, 1], got {g}"
                )));
            }
        }
        let p = self.theta * self.lambda;
        let near_int = (p - p.round()).abs() < 1e-9 && p.round() >= 1.0;
        if !near_int && !(1.0 < p && p < 2.0) {
            return Err(Error::InvalidConfig(format!(
                "theta * lambda = {p}; pick theta so the product lies in (1, 2) \
                 or is a positive integer, otherwise step decay is unstable"
            )));
        }
        Ok(())
    }

    /// Expands the gamma list to one value per subproblem.
    pub fn resolve_gamma(&self, subproblems: usize) -> Result<Vec<f64>> {
        if self.gamma.len() == 1 {
            return Ok(vec![self.gamma[0]; subproblems]);
        }
        if self.gamma.len() == subproblems {
            return Ok(self.gamma.clone());
        }
        Err(Error::InvalidConfig(format!(
            "gamma has {} entries but there are {subproblems} subproblems; \
             give one shared value or one per subproblem",
            self.gamma.len()
        )))
    }
}

/// Step size of iteration `i` (1-based): `theta / i`.
pub fn step_size(theta: f64, i: usize) -> f64 {
    assert!(i >= 1, "iterations are 1-based");
    theta / i as f64
}

/// Coefficient rows of a streamed model, one `width`-wide row per iteration.
#[derive(Debug, Clone)]
pub struct CoefficientSeries {
    data: Vec<f64>,
    width: usize,
}

impl CoefficientSeries {
    pub fn new(width: usize) -> Self {
        assert!(width >= 1);
        Self {
            data: Vec::new(),
            width,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of rows pushed so far.
    pub fn rows(&self) -> usize {
        self.data.len() / self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.width..(idx + 1) * self.width]
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.width);
        self.data.extend_from_slice(row);
    }

    pub fn into_matrix(self) -> Array2<f64> {
        let rows = self.rows();
        Array2::from_shape_vec((rows, self.width), self.data).expect("row-major series")
    }
}

/// Scales every stored row by `1 - eta_lambda`, the per-iteration shrink
/// applied to all earlier coefficients before a new row is pushed.
pub fn decay_coefficients(series: &mut CoefficientSeries, eta_lambda: f64) {
    let factor = 1.0 - eta_lambda;
    for v in &mut series.data {
        *v *= factor;
    }
}

/// Row indices drawn for one iteration: one batch per class, all the same
/// size, plus one unlabeled batch shared by every subproblem.
#[derive(Debug, Clone)]
pub struct IterationBatches {
    /// `class_rows[c]` indexes labeled rows of class `c + 1`, drawn with
    /// replacement.
    pub class_rows: Vec<Vec<usize>>,
    /// Indices into the unlabeled pool; empty when the pool is empty.
    pub unlabeled_rows: Vec<usize>,
}

/// Draws the per-class and unlabeled batches for one iteration.
///
/// Subproblem `j` then reads its positives from classes `j+1..=k` and its
/// negatives from classes `1..=j`, so one draw serves all `k - 1`
/// subproblems.
pub fn sample_iteration_batches(
    split: &SemiSupervisedSplit,
    batch: usize,
    rng: &mut ChaCha8Rng,
) -> IterationBatches {
    let k = split.k();
    let labeled = split.labeled();
    let mut class_rows = Vec::with_capacity(k);
    for c in 1..=k {
        let pool = labeled.class_rows(c);
        assert!(!pool.is_empty(), "labeled split covers every class");
        let mut picks = Vec::with_capacity(batch);
        for _ in 0..batch {
            picks.push(pool[rng.gen_range(0..pool.len())]);
        }
        class_rows.push(picks);
    }
    let n_u = split.n_unlabeled();
    let unlabeled_rows = if n_u == 0 {
        Vec::new()
    } else {
        (0..batch).map(|_| rng.gen_range(0..n_u)).collect()
    };
    IterationBatches {
        class_rows,
        unlabeled_rows,
    }
}

/// One new coefficient row from a scored batch.
///
/// `scores` and `feats` hold one row per batch slot in class-major order:
/// `batch` slots for class 1, then class 2, up to class `k`, then the
/// unlabeled slots (if any). For each subproblem the squared-loss pair
/// derivatives are averaged over the batch pairs, weighted by that
/// subproblem's gamma split, and the whole sum is scaled by
/// `-eta / (k - 1)`.
pub fn gradient_coefficient(
    scores: &[f64],
    feats: &Array2<f64>,
    batch: usize,
    k: usize,
    gamma: &[f64],
    eta: f64,
) -> Result<Vec<f64>> {
    assert_eq!(scores.len(), feats.nrows());
    assert_eq!(gamma.len(), k - 1);
    let labeled_slots = k * batch;
    assert!(scores.len() == labeled_slots || scores.len() == labeled_slots + batch);
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidData("non-finite batch score".into()));
    }
    let has_unlabeled = scores.len() > labeled_slots;
    let unl = labeled_slots..scores.len();

    let width = feats.ncols();
    let mut alpha = vec![0.0; width];
    let add_pair_terms = |first: std::ops::Range<usize>,
                              second: std::ops::Range<usize>,
                              weight: f64,
                              alpha: &mut [f64]| {
        let n_a = first.len() as f64;
        let n_b = second.len() as f64;
        let mean_a = scores[first.clone()].iter().sum::<f64>() / n_a;
        let mean_b = scores[second.clone()].iter().sum::<f64>() / n_b;
        // Averaged over pairs, the first-argument derivative of the squared
        // loss factorizes through the opposing batch mean.
        for a in first {
            let c = weight * (-2.0 / n_a) * (1.0 - scores[a] + mean_b);
            let row = feats.row(a);
            for (dst, &f) in alpha.iter_mut().zip(row.iter()) {
                *dst += c * f;
            }
        }
        for b in second {
            let c = weight * (2.0 / n_b) * (1.0 - mean_a + scores[b]);
            let row = feats.row(b);
            for (dst, &f) in alpha.iter_mut().zip(row.iter()) {
                *dst += c * f;
            }
        }
    };

    for j in 1..k {
        let g = gamma[j - 1];
        let pos = j * batch..labeled_slots;
        let neg = 0..j * batch;
        if g > 0.0 {
            add_pair_terms(pos.clone(), neg.clone(), g, &mut alpha);
        }
        if g < 1.0 && has_unlabeled {
            add_pair_terms(pos, unl.clone(), 1.0 - g, &mut alpha);
            add_pair_terms(unl.clone(), neg, 1.0 - g, &mut alpha);
        }
    }

    let scale = -eta / (k - 1) as f64;
    for v in &mut alpha {
        *v *= scale;
    }
    Ok(alpha)
}

/// Snapshot emitted after each training iteration.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ProgressRecord {
    /// 1-based iteration index.
    pub i: usize,
    /// Step size used at this iteration.
    pub eta: f64,
    /// Squared-loss surrogate risk of the current batch under the model
    /// entering the iteration, averaged over subproblems.
    pub surrogate_risk: f64,
    /// Wall time of the iteration in nanoseconds.
    pub elapsed_ns: u64,
}

/// Trains a ranking model and fits its thresholds.
pub fn train(split: &SemiSupervisedSplit, config: &TrainConfig) -> Result<RankModel> {
    train_with_progress(split, config, &mut |_| {})
}

/// [`train`], invoking `sink` once per iteration with a progress snapshot.
pub fn train_with_progress(
    split: &SemiSupervisedSplit,
    config: &TrainConfig,
    sink: &mut dyn FnMut(&ProgressRecord),
) -> Result<RankModel> {
    config.validate()?;
    let k = split.k();
    if k < 2 {
        return Err(Error::InvalidData(
            "training needs at least 2 classes".into(),
        ));
    }
    for c in 1..=k {
        if split.labeled().class_count(c) == 0 {
            return Err(Error::InvalidData(format!(
                "labeled pool has no rows of class {c}; every class needs at least one"
            )));
        }
    }
    let mut gammas = config.resolve_gamma(k - 1)?;
    if split.n_unlabeled() == 0 && gammas.iter().any(|&g| g < 1.0) {
        log::warn!("unlabeled pool is empty; falling back to labeled-only risk (gamma = 1)");
        gammas.iter_mut().for_each(|g| *g = 1.0);
    }

    let d = split.dim();
    let spec = KernelSpec::new(config.sigma, d)?;
    let stream = FeatureStream::new(config.master_seed, config.m, spec.clone())?;
    let mut batch_rng = ChaCha8Rng::seed_from_u64(iteration_seed(config.master_seed, 0));

    let batch = config.batch;
    let labeled = split.labeled();
    let n_pts_max = k * batch + if split.n_unlabeled() > 0 { batch } else { 0 };
    let width = 2 * config.m;
    let mut series = CoefficientSeries::new(width);
    let mut pts = Array2::<f64>::zeros((n_pts_max, d));
    let mut phis = Array2::<f64>::zeros((n_pts_max, width));

    for i in 1..=config.t_max {
        let started = Instant::now();
        let batches = sample_iteration_batches(split, batch, &mut batch_rng);

        let mut slot = 0usize;
        for class in &batches.class_rows {
            for &row in class {
                pts.row_mut(slot).assign(&labeled.features().row(row));
                slot += 1;
            }
        }
        for &row in &batches.unlabeled_rows {
            pts.row_mut(slot)
                .assign(&split.unlabeled_features().row(row));
            slot += 1;
        }
        debug_assert_eq!(slot, n_pts_max);

        let scores = score_points(&stream, series.data(), i - 1, pts.view())?;
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::Numeric {
                iteration: i,
                msg: "batch scores diverged; lower theta or lambda".into(),
            });
        }

        let omega = stream.sample_omega_block(i);
        for (slot, x) in pts.rows().into_iter().enumerate() {
            let phi = feature_map(omega.view(), x)?;
            phis.row_mut(slot)
                .assign(&ndarray::ArrayView1::from(&phi[..]));
        }

        let eta = step_size(config.theta, i);
        let alpha =
            gradient_coefficient(&scores, &phis, batch, k, &gammas, eta).map_err(|e| match e {
                Error::InvalidData(msg) => Error::Numeric { iteration: i, msg },
                other => other,
            })?;

        let surrogate_risk = batch_surrogate_risk(&scores, batch, k, &gammas)?;

        decay_coefficients(&mut series, eta * config.lambda);
        series.push_row(&alpha);

        sink(&ProgressRecord {
            i,
            eta,
            surrogate_risk,
            elapsed_ns: started.elapsed().as_nanos() as u64,
        });
    }

    let train_scores = score_points(
        &stream,
        series.data(),
        config.t_max,
        labeled.features().view(),
    )?;
    if train_scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numeric {
            iteration: config.t_max,
            msg: "final training scores are non-finite".into(),
        });
    }
    let thresholds = fit_thresholds(&train_scores, labeled.labels(), k)?;
    RankModel::new(
        spec,
        config.master_seed,
        config.m,
        series.into_matrix(),
        thresholds,
        k,
    )
}

fn batch_surrogate_risk(scores: &[f64], batch: usize, k: usize, gamma: &[f64]) -> Result<f64> {
    let labeled_slots = k * batch;
    let unl = &scores[labeled_slots..];
    let mut risks = Vec::with_capacity(k - 1);
    for j in 1..k {
        let pos = &scores[j * batch..labeled_slots];
        let neg = &scores[..j * batch];
        let pn = auc_risk_pn(pos, neg, LossKind::Squared)?;
        let (pu, nu, g) = if unl.is_empty() {
            (0.0, 0.0, 1.0)
        } else {
            (
                auc_risk_pu(pos, unl, LossKind::Squared)?,
                auc_risk_nu(unl, neg, LossKind::Squared)?,
                gamma[j - 1],
            )
        };
        risks.push(risk_pnu(pn, pu, nu, g)?);
    }
    Ok(risks.iter().sum::<f64>() / risks.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{gaussian_ordinal, make_semi_split};
    use crate::eval::auc_rank_sum;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn tiny_split(seed: u64) -> SemiSupervisedSplit {
        let ds = gaussian_ordinal(&[-2.0, 0.0, 2.0], 0.4, 20, 3, seed).expect("synth");
        make_semi_split(&ds, 24, seed).expect("split")
    }

    #[test]
    fn config_validation_enforces_step_product_rule() {
        let ok = TrainConfig {
            lambda: 1.0,
            theta: 1.5,
            ..TrainConfig::default()
        };
        ok.validate().expect("1.5 is inside (1, 2)");
        let integer = TrainConfig {
            lambda: 0.5,
            theta: 6.0,
            ..TrainConfig::default()
        };
        integer.validate().expect("3 is a positive integer");
        let bad = TrainConfig {
            lambda: 1.0,
            theta: 0.5,
            ..TrainConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let bad_gamma = TrainConfig {
            gamma: vec![1.5],
            ..TrainConfig::default()
        };
        assert!(bad_gamma.validate().is_err());
    }

    #[test]
    fn gamma_resolution_broadcasts_or_matches() {
        let cfg = TrainConfig {
            gamma: vec![0.3],
            ..TrainConfig::default()
        };
        assert_eq!(cfg.resolve_gamma(4).expect("broadcast"), vec![0.3; 4]);
        let per = TrainConfig {
            gamma: vec![0.1, 0.9],
            ..TrainConfig::default()
        };
        assert_eq!(per.resolve_gamma(2).expect("exact"), vec![0.1, 0.9]);
        assert!(per.resolve_gamma(3).is_err());
    }

    #[test]
    fn step_sizes_follow_theta_over_i() {
        assert_eq!(step_size(1.5, 1), 1.5);
        assert_eq!(step_size(1.5, 3), 0.5);
        assert_eq!(step_size(2.0, 4), 0.5);
    }

    #[test]
    fn decay_then_push_matches_closed_form_weights() {
        // After t steps, row i must carry weight -eta_i * prod_{j>i} (1 - eta_j * lambda)
        // relative to the raw gradient row. Feed unit rows through the series
        // and compare against the product computed directly.
        let theta = 1.5;
        let lambda = 1.0;
        let t = 40;
        let mut series = CoefficientSeries::new(1);
        for i in 1..=t {
            let eta = step_size(theta, i);
            decay_coefficients(&mut series, eta * lambda);
            series.push_row(&[-eta]);
        }
        for i in 1..=t {
            let eta_i = step_size(theta, i);
            let mut expect = -eta_i;
            for j in (i + 1)..=t {
                expect *= 1.0 - step_size(theta, j) * lambda;
            }
            assert_abs_diff_eq!(series.row(i - 1)[0], expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn coefficient_weights_respect_theta_over_t_bound() {
        // Scalar recursion form of the decay-then-push weight bound at theta*lambda = 1.5.
        let theta = 1.5;
        let lambda = 1.0;
        let t = 2_000;
        let mut weights = Vec::with_capacity(t);
        for i in 1..=t {
            let eta = step_size(theta, i);
            for w in weights.iter_mut() {
                *w *= 1.0 - eta * lambda;
            }
            weights.push(-eta);
        }
        let bound = theta / t as f64;
        let mut sum_sq = 0.0;
        for &w in &weights {
            assert!(w.abs() <= bound + 1e-12, "|{w}| exceeds {bound}");
            sum_sq += w * w;
        }
        assert!(sum_sq <= theta * theta / t as f64 + 1e-9);
    }

    #[test]
    fn batch_sampling_is_deterministic_and_in_range() {
        let split = tiny_split(11);
        let mut rng_a = ChaCha8Rng::seed_from_u64(5);
        let mut rng_b = ChaCha8Rng::seed_from_u64(5);
        let a = sample_iteration_batches(&split, 4, &mut rng_a);
        let b = sample_iteration_batches(&split, 4, &mut rng_b);
        assert_eq!(a.class_rows, b.class_rows);
        assert_eq!(a.unlabeled_rows, b.unlabeled_rows);
        assert_eq!(a.class_rows.len(), split.k());
        for (c, picks) in a.class_rows.iter().enumerate() {
            assert_eq!(picks.len(), 4);
            for &row in picks {
                assert_eq!(split.labeled().labels()[row], c + 1);
            }
        }
        for &row in &a.unlabeled_rows {
            assert!(row < split.n_unlabeled());
        }
    }

    #[test]
    fn gradient_matches_hand_computed_two_class_case() {
        // One positive at score 0, one negative at score 0, gamma = 1:
        // l1' = -2 on the positive, l2' = +2 on the negative, so
        // alpha = -eta * (-2 phi_p + 2 phi_n) = 2 eta (phi_p - phi_n).
        let feats = array![[1.0, 0.0], [0.0, 1.0]];
        let scores = [0.0, 0.0];
        let eta = 0.25;
        let alpha = gradient_coefficient(&scores, &feats, 1, 2, &[1.0], eta).expect("gradient");
        // Slot 0 is class 1 (negative), slot 1 is class 2 (positive).
        assert_abs_diff_eq!(alpha[0], -2.0 * eta, epsilon = 1e-15);
        assert_abs_diff_eq!(alpha[1], 2.0 * eta, epsilon = 1e-15);
    }

    #[test]
    fn gradient_factorization_agrees_with_pair_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let k = rng.gen_range(2..=4);
            let batch = rng.gen_range(1..=5);
            let width = 6;
            let n = k * batch + batch;
            let feats = Array2::from_shape_fn((n, width), |_| rng.gen_range(-1.0..1.0));
            let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let gamma: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let eta = 0.7;
            let fast =
                gradient_coefficient(&scores, &feats, batch, k, &gamma, eta).expect("gradient");

            let mut slow = vec![0.0; width];
            let pair = |slow: &mut Vec<f64>, a: usize, b: usize, w: f64, n_pairs: f64| {
                let l1 = -2.0 * (1.0 - scores[a] + scores[b]);
                let l2 = 2.0 * (1.0 - scores[a] + scores[b]);
                for c in 0..width {
                    slow[c] += w / n_pairs * (l1 * feats[[a, c]] + l2 * feats[[b, c]]);
                }
            };
            for j in 1..k {
                let g = gamma[j - 1];
                let pos: Vec<usize> = (j * batch..k * batch).collect();
                let neg: Vec<usize> = (0..j * batch).collect();
                let unl: Vec<usize> = (k * batch..n).collect();
                for &a in &pos {
                    for &b in &neg {
                        pair(&mut slow, a, b, g, (pos.len() * neg.len()) as f64);
                    }
                }
                for &a in &pos {
                    for &u in &unl {
                        pair(&mut slow, a, u, 1.0 - g, (pos.len() * unl.len()) as f64);
                    }
                }
                for &u in &unl {
                    for &b in &neg {
                        pair(&mut slow, u, b, 1.0 - g, (unl.len() * neg.len()) as f64);
                    }
                }
            }
            let scale = -eta / (k - 1) as f64;
            for v in &mut slow {
                *v *= scale;
            }
            for (f, s) in fast.iter().zip(&slow) {
                assert_abs_diff_eq!(f, s, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn training_on_separable_data_ranks_classes_correctly() {
        let ds = gaussian_ordinal(&[-3.0, 0.0, 3.0], 0.3, 40, 2, 42).expect("synth");
        let split = make_semi_split(&ds, 30, 42).expect("split");
        let config = TrainConfig {
            m: 16,
            t_max: 400,
            batch: 4,
            gamma: vec![0.5],
            ..TrainConfig::default()
        };
        let model = train(&split, &config).expect("train");
        let scores = model
            .predict_scores(ds.features().view())
            .expect("score all rows");
        for j in 1..ds.k() {
            let is_pos: Vec<bool> = ds.labels().iter().map(|&y| y > j).collect();
            let auc = auc_rank_sum(&scores, &is_pos).expect("auc");
            assert!(auc > 0.95, "subproblem {j} AUC {auc} too low");
        }
    }

    #[test]
    fn training_is_deterministic_in_the_master_seed() {
        let split = tiny_split(3);
        let config = TrainConfig {
            m: 8,
            t_max: 60,
            batch: 3,
            master_seed: 99,
            ..TrainConfig::default()
        };
        let a = train(&split, &config).expect("first run");
        let b = train(&split, &config).expect("second run");
        assert_eq!(a.coefficients(), b.coefficients());
        assert_eq!(a.thresholds().values(), b.thresholds().values());
        let other = TrainConfig {
            master_seed: 100,
            ..config
        };
        let c = train(&split, &other).expect("third run");
        assert_ne!(a.coefficients(), c.coefficients());
    }

    #[test]
    fn progress_records_cover_every_iteration() {
        let split = tiny_split(17);
        let config = TrainConfig {
            m: 4,
            t_max: 25,
            batch: 2,
            ..TrainConfig::default()
        };
        let mut seen = Vec::new();
        let model = train_with_progress(&split, &config, &mut |rec| seen.push(rec.clone()))
            .expect("train");
        assert_eq!(seen.len(), 25);
        for (idx, rec) in seen.iter().enumerate() {
            assert_eq!(rec.i, idx + 1);
            assert_abs_diff_eq!(rec.eta, 1.5 / (idx + 1) as f64, epsilon = 1e-15);
            assert!(rec.surrogate_risk.is_finite());
        }
        assert_eq!(model.t(), 25);
    }

    #[test]
    fn empty_unlabeled_pool_falls_back_to_labeled_risk() {
        let ds = gaussian_ordinal(&[-1.0, 1.0], 0.5, 10, 2, 7).expect("synth");
        let split = make_semi_split(&ds, ds.len(), 7).expect("split");
        assert_eq!(split.n_unlabeled(), 0);
        let config = TrainConfig {
            m: 4,
            t_max: 10,
            batch: 2,
            gamma: vec![0.3],
            ..TrainConfig::default()
        };
        train(&split, &config).expect("labeled-only fallback");
    }

    #[test]
    fn coefficient_memory_is_iterations_times_width() {
        let split = tiny_split(29);
        let config = TrainConfig {
            m: 8,
            t_max: 30,
            batch: 2,
            ..TrainConfig::default()
        };
        let model = train(&split, &config).expect("train");
        assert_eq!(model.coefficients().nrows(), 30);
        assert_eq!(model.coefficients().ncols(), 16);
    }
}
