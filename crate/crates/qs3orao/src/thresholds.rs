//! Ordered cut points that turn a scalar ranking score into class labels.
//!
//! Threshold `j` separates classes `1..=j` from classes `j+1..=k`. Each one
//! minimizes a hinge objective over the training scores: rows above class
//! `j` pay `max(0, 1 - (s - b))`, rows at or below pay `max(0, 1 - (b - s))`.
//! That objective is piecewise linear with unit slope changes at `s - 1` and
//! `s + 1`, so its minimizer is an order statistic of those breakpoints; the
//! midpoint of the flat minimizing segment is returned and ties across
//! consecutive thresholds are separated by a small epsilon.

use crate::error::{Error, Result};

/// Strictly increasing cut points, one fewer than the class count.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    b: Vec<f64>,
}

impl Thresholds {
    pub fn new(b: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::InvalidData("no thresholds given".into()));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite threshold".into()));
        }
        if b.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidData(format!(
                "thresholds must be strictly increasing, got {b:?}"
            )));
        }
        Ok(Self { b })
    }

    pub fn values(&self) -> &[f64] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }
}

/// Hinge objective of threshold `j` at cut point `b`.
///
/// This is the quantity [`fit_thresholds`] minimizes per threshold; it is
/// exposed so callers can audit a fitted cut against alternatives.
pub fn threshold_loss(scores: &[f64], labels: &[usize], j: usize, b: f64) -> f64 {
    let mut total = 0.0;
    for (&s, &y) in scores.iter().zip(labels) {
        if y > j {
            total += (1.0 - (s - b)).max(0.0);
        } else {
            total += (1.0 - (b - s)).max(0.0);
        }
    }
    total
}

/// Fits all `k - 1` thresholds to scored, labeled data.
///
/// Every class in `1..=k` must appear. Each threshold is the midpoint of the
/// flat segment on which its hinge objective bottoms out; midpoint ties
/// between consecutive thresholds are broken by nudging the later one up by
/// `1e-9` of the score range, which keeps the result strictly increasing
/// without moving any cut meaningfully.
pub fn fit_thresholds(scores: &[f64], labels: &[usize], k: usize) -> Result<Thresholds> {
    if scores.len() != labels.len() {
        return Err(Error::InvalidData(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if k < 2 {
        return Err(Error::InvalidData("need at least 2 classes".into()));
    }
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData("non-finite score".into()));
    }
    let mut class_count = vec![0usize; k + 1];
    for &y in labels {
        if y == 0 || y > k {
            return Err(Error::InvalidData(format!("label {y} outside 1..={k}")));
        }
        class_count[y] += 1;
    }
    for c in 1..=k {
        if class_count[c] == 0 {
            return Err(Error::InvalidData(format!(
                "class {c} has no instances; every class needs at least one"
            )));
        }
    }

    let mut b = Vec::with_capacity(k - 1);
    let mut events = Vec::with_capacity(scores.len());
    for j in 1..k {
        // Breakpoints of the piecewise-linear objective. Walking them in
        // ascending order raises the slope by one per event, starting at
        // minus the negative count, so the objective bottoms out between
        // the n_neg-th and (n_neg + 1)-th smallest events.
        events.clear();
        let mut n_neg = 0usize;
        for (&s, &y) in scores.iter().zip(labels) {
            if y > j {
                events.push(s - 1.0);
            } else {
                events.push(s + 1.0);
                n_neg += 1;
            }
        }
        events.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite scores"));
        let lo = events[n_neg - 1];
        let hi = events[n_neg];
        b.push(0.5 * (lo + hi));
    }

    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let eps = 1e-9 * (max - min).max(1.0);
    for j in 1..b.len() {
        if b[j] <= b[j - 1] {
            b[j] = b[j - 1] + eps;
        }
    }
    Thresholds::new(b)
}

/// Maps a score to the smallest class whose threshold lies above it.
///
/// A score exactly on threshold `j` belongs to class `j + 1`.
pub fn predict_label(score: f64, thresholds: &Thresholds) -> usize {
    thresholds.b.partition_point(|&bj| bj <= score) + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn three_well_separated_classes() {
        let scores = [-2.0, 0.0, 2.0];
        let labels = [1, 2, 3];
        let th = fit_thresholds(&scores, &labels, 3).expect("fit");
        assert_eq!(th.values(), &[-1.0, 1.0]);
    }

    #[test]
    fn wide_margin_puts_cut_at_segment_midpoint() {
        let scores = [-10.0, 10.0];
        let labels = [1, 2];
        let th = fit_thresholds(&scores, &labels, 2).expect("fit");
        assert_eq!(th.values(), &[0.0]);
    }

    #[test]
    fn interleaved_classes_balance_hinges() {
        // Events for j=1: positives at 0 and 2, negatives at 1 and 3; the
        // objective is flat on [1, 2], so the cut lands at 1.5.
        let scores = [0.0, 1.0, 2.0, 3.0];
        let labels = [1, 2, 1, 2];
        let th = fit_thresholds(&scores, &labels, 2).expect("fit");
        assert_eq!(th.values(), &[1.5]);
    }

    #[test]
    fn fitted_cut_beats_dense_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..30 {
            let k = rng.gen_range(3..=5);
            let n = 40;
            let mut scores = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for i in 0..n {
                let y = 1 + i % k;
                labels.push(y);
                scores.push(y as f64 * 0.8 + rng.gen_range(-1.2..1.2));
            }
            let th = fit_thresholds(&scores, &labels, k).expect("fit");
            let lo = scores.iter().copied().fold(f64::INFINITY, f64::min) - 5.0;
            let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 5.0;
            for (idx, &b) in th.values().iter().enumerate() {
                let j = idx + 1;
                let fitted = threshold_loss(&scores, &labels, j, b);
                let steps = ((hi - lo) / 1e-3) as usize;
                for s in 0..=steps {
                    let g = lo + s as f64 * 1e-3;
                    let at_grid = threshold_loss(&scores, &labels, j, g);
                    assert!(
                        fitted <= at_grid + 1e-9,
                        "round {round} j {j}: loss {fitted} at {b} beaten by {at_grid} at {g}"
                    );
                }
            }
        }
    }

    #[test]
    fn thresholds_are_strictly_increasing_on_random_fixtures() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..300 {
            let k = rng.gen_range(2..=6);
            let n = rng.gen_range(k..60);
            let mut labels: Vec<usize> = (0..n).map(|i| 1 + i % k).collect();
            // Scores from a coarse grid force heavy ties.
            let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(-2i32..=2) as f64).collect();
            use rand::seq::SliceRandom;
            labels.shuffle(&mut rng);
            let th = fit_thresholds(&scores, &labels, k).expect("fit");
            for w in th.values().windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn identical_scores_still_give_ordered_cuts() {
        let scores = [0.5; 9];
        let labels = [1, 1, 1, 2, 2, 2, 3, 3, 3];
        let th = fit_thresholds(&scores, &labels, 3).expect("fit");
        assert!(th.values()[0] < th.values()[1]);
    }

    #[test]
    fn shift_equivariance_on_dyadic_scores() {
        // Dyadic scores and a dyadic shift keep every breakpoint arithmetic
        // exact, so the cuts move by exactly the shift.
        let scores = [-1.5, -0.25, 0.5, 1.75, 2.5, 3.0];
        let labels = [1, 1, 2, 2, 3, 3];
        let base = fit_thresholds(&scores, &labels, 3).expect("fit");
        let c = 2.5;
        let shifted: Vec<f64> = scores.iter().map(|s| s + c).collect();
        let moved = fit_thresholds(&shifted, &labels, 3).expect("fit");
        for (a, b) in base.values().iter().zip(moved.values()) {
            assert_eq!(a + c, *b);
        }
    }

    #[test]
    fn labels_partition_at_cut_points() {
        let th = Thresholds::new(vec![-1.0, 1.0]).expect("build");
        assert_eq!(predict_label(-5.0, &th), 1);
        assert_eq!(predict_label(0.0, &th), 2);
        assert_eq!(predict_label(5.0, &th), 3);
        // Scores exactly on a cut belong to the class above it.
        assert_eq!(predict_label(-1.0, &th), 2);
        assert_eq!(predict_label(1.0, &th), 3);
    }

    #[test]
    fn constructor_rejects_disorder() {
        assert!(Thresholds::new(vec![0.0, 0.0]).is_err());
        assert!(Thresholds::new(vec![1.0, -1.0]).is_err());
        assert!(Thresholds::new(vec![]).is_err());
        assert!(Thresholds::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn fit_rejects_missing_class_and_bad_lengths() {
        assert!(fit_thresholds(&[0.0, 1.0], &[1, 3], 3).is_err());
        assert!(fit_thresholds(&[0.0], &[1, 2], 2).is_err());
        assert!(fit_thresholds(&[0.0, f64::NAN], &[1, 2], 2).is_err());
    }
}
