//! Pairwise ranking losses and the AUC risks built from them.
//!
//! The training objective scores ordered pairs: a positive score `u` should
//! exceed the other side's score `v`. Risks come in three flavours depending
//! on which pools supply the pair (positive/negative, positive/unlabeled,
//! unlabeled/negative), and the semi-supervised risk blends them with a
//! weight `gamma`. Small pools are averaged by full pair enumeration; large
//! pools switch to closed forms with identical expectations.

use crate::error::{Error, Result};
use crate::eval::auc_rank_sum;

/// Side size above which pair enumeration gives way to the closed forms.
const ENUMERATION_LIMIT: usize = 10_000;

/// Ranking zero-one loss with ties counted half: `(1 - sign(u - v)) / 2`.
pub fn zero_one(u: f64, v: f64) -> f64 {
    if u > v {
        0.0
    } else if u < v {
        1.0
    } else {
        0.5
    }
}

/// A differentiable loss on score pairs `(u, v)`.
pub trait PairLoss {
    fn value(&self, u: f64, v: f64) -> f64;
    /// Partial derivative in the first argument.
    fn d_first(&self, u: f64, v: f64) -> f64;
    /// Partial derivative in the second argument.
    fn d_second(&self, u: f64, v: f64) -> f64;
}

/// Squared surrogate `(1 - u + v)^2` of the ranking zero-one loss.
#[derive(Debug, Clone, Copy, Default)]
pub struct SquaredPairLoss;

impl PairLoss for SquaredPairLoss {
    fn value(&self, u: f64, v: f64) -> f64 {
        let margin = 1.0 - u + v;
        margin * margin
    }

    fn d_first(&self, u: f64, v: f64) -> f64 {
        -2.0 * (1.0 - u + v)
    }

    fn d_second(&self, u: f64, v: f64) -> f64 {
        2.0 * (1.0 - u + v)
    }
}

/// Loss selector for the risk functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    ZeroOne,
    Squared,
}

fn check_side(name: &str, scores: &[f64]) -> Result<()> {
    if scores.is_empty() {
        return Err(Error::InvalidData(format!("{name} side has no scores")));
    }
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidData(format!("{name} side contains a non-finite score")));
    }
    Ok(())
}

/// Mean pair loss with `first` supplying the first argument.
fn pair_mean(first: &[f64], second: &[f64], loss: LossKind) -> f64 {
    if first.len().max(second.len()) > ENUMERATION_LIMIT {
        pair_mean_closed(first, second, loss)
    } else {
        pair_mean_enumerate(first, second, loss)
    }
}

fn pair_mean_enumerate(first: &[f64], second: &[f64], loss: LossKind) -> f64 {
    let mut total = 0.0;
    for &u in first {
        for &v in second {
            total += match loss {
                LossKind::ZeroOne => zero_one(u, v),
                LossKind::Squared => SquaredPairLoss.value(u, v),
            };
        }
    }
    total / (first.len() as f64 * second.len() as f64)
}

fn pair_mean_closed(first: &[f64], second: &[f64], loss: LossKind) -> f64 {
    match loss {
        LossKind::ZeroOne => {
            // The mean zero-one pair loss is one minus the probability that
            // a random `first` score ranks above a random `second` score,
            // which is exactly the rank-sum statistic.
            let mut scores = Vec::with_capacity(first.len() + second.len());
            let mut is_first = Vec::with_capacity(first.len() + second.len());
            scores.extend_from_slice(first);
            is_first.extend(std::iter::repeat(true).take(first.len()));
            scores.extend_from_slice(second);
            is_first.extend(std::iter::repeat(false).take(second.len()));
            1.0 - auc_rank_sum(&scores, &is_first).expect("both sides non-empty")
        }
        LossKind::Squared => {
            // (1 - u + v)^2 expands into first and second moments of each
            // side, so the mean needs one pass per side.
            let n1 = first.len() as f64;
            let n2 = second.len() as f64;
            let m1a = first.iter().sum::<f64>() / n1;
            let m2a = first.iter().map(|v| v * v).sum::<f64>() / n1;
            let m1b = second.iter().sum::<f64>() / n2;
            let m2b = second.iter().map(|v| v * v).sum::<f64>() / n2;
            1.0 + m2a + m2b - 2.0 * m1a + 2.0 * m1b - 2.0 * m1a * m1b
        }
    }
}

/// Supervised AUC risk: mean loss over positive x negative score pairs.
pub fn auc_risk_pn(pos: &[f64], neg: &[f64], loss: LossKind) -> Result<f64> {
    check_side("positive", pos)?;
    check_side("negative", neg)?;
    Ok(pair_mean(pos, neg, loss))
}

/// Positive-unlabeled AUC risk: mean loss over positive x unlabeled pairs.
pub fn auc_risk_pu(pos: &[f64], unl: &[f64], loss: LossKind) -> Result<f64> {
    check_side("positive", pos)?;
    check_side("unlabeled", unl)?;
    Ok(pair_mean(pos, unl, loss))
}

/// Unlabeled-negative AUC risk: mean loss over unlabeled x negative pairs.
pub fn auc_risk_nu(unl: &[f64], neg: &[f64], loss: LossKind) -> Result<f64> {
    check_side("unlabeled", unl)?;
    check_side("negative", neg)?;
    Ok(pair_mean(unl, neg, loss))
}

/// Blends the supervised and unlabeled risks:
/// `gamma * pn + (1 - gamma) * (pu + nu - 1/2)`.
pub fn risk_pnu(pn: f64, pu: f64, nu: f64, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidConfig(format!(
            "gamma must lie in [0, 1], got {gamma}"
        )));
    }
    Ok(gamma * pn + (1.0 - gamma) * (pu + nu - 0.5))
}

/// Mean of the per-subproblem risks.
pub fn overall_risk(per_subproblem: &[f64]) -> Result<f64> {
    if per_subproblem.is_empty() {
        return Err(Error::InvalidData("no subproblem risks to average".into()));
    }
    Ok(per_subproblem.iter().sum::<f64>() / per_subproblem.len() as f64)
}
