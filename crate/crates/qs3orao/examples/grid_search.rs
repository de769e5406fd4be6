//! Cross-validated hyperparameter search over a small grid, driven through
//! the library API.
//!
//! The labeled rows are split into two folds; each (lambda, gamma) cell
//! trains on one fold and scores AUC on the other, sharing the same
//! unlabeled pool. theta follows lambda so the step-size constraint holds
//! in every cell.

use qs3orao::data::{gaussian_ordinal, make_semi_split, SemiSupervisedSplit};
use qs3orao::eval::evaluate_model;
use qs3orao::{train, TrainConfig};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qs3orao::Result<()> {
    let ds = gaussian_ordinal(&[-2.0, 0.0, 2.0], 0.9, 300, 3, 66)?;
    let split = make_semi_split(&ds, 120, 66)?;
    let labeled = split.labeled();

    let mut order: Vec<usize> = (0..labeled.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    order.shuffle(&mut rng);
    let (fold_a, fold_b) = order.split_at(labeled.len() / 2);

    let lambdas = [0.5f64, 1.0, 2.0];
    let gammas = [0.3f64, 0.7, 1.0];
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    println!("{:>8} {:>8} {:>10}", "lambda", "gamma", "mean AUC");
    for &lambda in &lambdas {
        for &gamma in &gammas {
            let mut total = 0.0;
            for (train_idx, val_idx) in [(fold_a, fold_b), (fold_b, fold_a)] {
                let train_ds = labeled.subset(train_idx)?;
                let val_ds = labeled.subset(val_idx)?;
                let cell_split = SemiSupervisedSplit::from_parts(
                    train_ds,
                    split.unlabeled_features().clone(),
                    66,
                )?;
                let config = TrainConfig {
                    lambda,
                    theta: 1.5 / lambda,
                    gamma: vec![gamma],
                    m: 16,
                    t_max: 250,
                    batch: 6,
                    sigma: 0.5,
                    master_seed: 66,
                };
                let model = train(&cell_split, &config)?;
                total += evaluate_model(&model, &val_ds)?.overall_auc;
            }
            let mean = total / 2.0;
            println!("{lambda:>8} {gamma:>8} {mean:>10.4}");
            if mean > best.0 {
                best = (mean, lambda, gamma);
            }
        }
    }
    println!(
        "\nbest cell: lambda {} gamma {} with mean AUC {:.4}",
        best.1, best.2, best.0
    );
    Ok(())
}
