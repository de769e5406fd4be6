//! Shows what the unlabeled pool contributes to training.
//!
//! Part one scores a trained model on labeled rows and on a 5000-row
//! unlabeled pool, then reconstructs the supervised pairwise ranking risk
//! from the positive-vs-pool and pool-vs-negative risks alone. The two
//! estimates target the same quantity, so they agree up to sampling error
//! even though the reconstruction never compares a labeled pair directly.
//! That reconstruction is exactly the term the trainer blends in when
//! gamma < 1.
//!
//! Part two runs the gamma ablation on a few-label fixture with heavy
//! class overlap: 20 labeled rows per class against the 5000-row pool,
//! trained at several gamma values and scored on a large held-out test
//! set. The printed AUC differences are measured, not asserted; on
//! Gaussian fixtures like this one they sit within a few 1e-4 of the
//! labels-only run.

use ndarray::s;
use qs3orao::data::{gaussian_ordinal, SemiSupervisedSplit};
use qs3orao::eval::evaluate_model;
use qs3orao::risk::{auc_risk_nu, auc_risk_pn, auc_risk_pu, LossKind};
use qs3orao::trainer::{train, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let means = [-2.0, 0.0, 2.0];
    let noise = 1.2;
    let d = 2;

    let labeled = gaussian_ordinal(&means, noise, 20, d, 9_000)?;
    let source = gaussian_ordinal(&means, noise, 1_667, d, 9_100)?;
    let pool = source.features().slice(s![..5_000, ..]).to_owned();
    let split = SemiSupervisedSplit::from_parts(labeled.clone(), pool, 9_300)?;
    let config = TrainConfig {
        lambda: 1.0,
        theta: 1.5,
        gamma: vec![0.5],
        m: 32,
        t_max: 400,
        batch: 8,
        sigma: 2.0,
        master_seed: 9_400,
    };
    let model = train(&split, &config)?;

    println!("risk reconstruction from the unlabeled pool (zero-one loss)");
    println!("subproblem  labeled-pairs  pool-reconstructed  difference");
    let holdout = gaussian_ordinal(&means, noise, 2_000, d, 9_500)?;
    let holdout_scores = model.predict_scores(holdout.features().view())?;
    let pool_scores = model.predict_scores(split.unlabeled_features().view())?;
    let k = holdout.k();
    for j in 1..k {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (row, &label) in holdout.labels().iter().enumerate() {
            if label > j {
                pos.push(holdout_scores[row]);
            } else {
                neg.push(holdout_scores[row]);
            }
        }
        let direct = auc_risk_pn(&pos, &neg, LossKind::ZeroOne)?;
        let from_pool = auc_risk_pu(&pos, &pool_scores, LossKind::ZeroOne)?
            + auc_risk_nu(&pool_scores, &neg, LossKind::ZeroOne)?
            - 0.5;
        println!(
            "{j:>10}  {direct:>13.4}  {from_pool:>18.4}  {:>10.4}",
            from_pool - direct
        );
    }

    println!();
    println!("gamma ablation: 20 labeled per class vs the 5000-row pool");
    let gammas = [0.3f64, 0.5, 0.7, 1.0];
    let trials = 3u64;
    let mut mean_by_gamma = vec![0.0f64; gammas.len()];
    for trial in 0..trials {
        let labeled = gaussian_ordinal(&means, noise, 20, d, 9_600 + trial)?;
        let source = gaussian_ordinal(&means, noise, 1_667, d, 9_700 + trial)?;
        let pool = source.features().slice(s![..5_000, ..]).to_owned();
        let test = gaussian_ordinal(&means, noise, 667, d, 9_800 + trial)?;
        let split = SemiSupervisedSplit::from_parts(labeled, pool, 9_900 + trial)?;
        for (i, &gamma) in gammas.iter().enumerate() {
            let config = TrainConfig {
                gamma: vec![gamma],
                master_seed: 10_000 + trial,
                ..config.clone()
            };
            let model = train(&split, &config)?;
            mean_by_gamma[i] += evaluate_model(&model, &test)?.overall_auc / trials as f64;
        }
    }
    println!("gamma  mean test AUC over {trials} trials");
    for (i, &gamma) in gammas.iter().enumerate() {
        let tag = if gamma == 1.0 { "  (labels only)" } else { "" };
        println!("{gamma:>5.1}  {:.4}{tag}", mean_by_gamma[i]);
    }
    let best_blend = mean_by_gamma[..3].iter().cloned().fold(f64::MIN, f64::max);
    println!(
        "best blended mean {best_blend:.4}, labels-only {:.4}, difference {:+.4}",
        mean_by_gamma[3],
        best_blend - mean_by_gamma[3]
    );
    Ok(())
}
