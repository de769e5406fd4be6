//! Fits ordered thresholds to scored data and shows the resulting class
//! bands.
//!
//! Thresholds minimize a per-cut hinge objective; they come out strictly
//! increasing even when score ranges overlap heavily.

use qs3orao::thresholds::{fit_thresholds, predict_label, threshold_loss};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> qs3orao::Result<()> {
    let k = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for class in 1..=k {
        let center = class as f64 * 1.2 - 3.0;
        let noise = Normal::new(0.0, 0.8).expect("positive sd");
        for _ in 0..40 {
            scores.push(center + noise.sample(&mut rng));
            labels.push(class);
        }
    }

    let thresholds = fit_thresholds(&scores, &labels, k)?;
    println!("fitted thresholds: {:?}", thresholds.values());

    for (j, &b) in thresholds.values().iter().enumerate() {
        let loss_at = threshold_loss(&scores, &labels, j + 1, b);
        let loss_left = threshold_loss(&scores, &labels, j + 1, b - 0.05);
        let loss_right = threshold_loss(&scores, &labels, j + 1, b + 0.05);
        println!(
            "cut {}: loss {:.3} (vs {:.3} at -0.05, {:.3} at +0.05)",
            j + 1,
            loss_at,
            loss_left,
            loss_right
        );
    }

    println!("\nscore sweep:");
    let mut s = -3.5;
    while s <= 3.5 {
        let label = predict_label(s, &thresholds);
        println!("  score {s:>5.1} -> class {label}");
        s += 1.0;
    }

    let correct = scores
        .iter()
        .zip(&labels)
        .filter(|(s, y)| predict_label(**s, &thresholds) == **y)
        .count();
    println!(
        "\ntraining accuracy {:.1}% over {} rows",
        100.0 * correct as f64 / scores.len() as f64,
        scores.len()
    );
    Ok(())
}
