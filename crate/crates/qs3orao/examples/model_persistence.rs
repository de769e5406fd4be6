//! Saves a trained model, loads it back, and verifies the round trip is
//! exact: same file bytes, same prediction bits.
//!
//! Models store only the master seed, hyperparameters, thresholds, and the
//! coefficient matrix; frequency blocks are regenerated from the seed at
//! prediction time, so nothing else needs to be written.

use ndarray::Array2;
use qs3orao::data::{gaussian_ordinal, make_semi_split};
use qs3orao::{train, RankModel, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ds = gaussian_ordinal(&[-2.0, 0.0, 2.0], 0.6, 80, 3, 44)?;
    let split = make_semi_split(&ds, 60, 44)?;
    let config = TrainConfig {
        m: 16,
        t_max: 200,
        batch: 4,
        sigma: 0.5,
        master_seed: 44,
        ..TrainConfig::default()
    };
    let model = train(&split, &config)?;

    let dir = std::env::temp_dir();
    let path_a = dir.join("qs3orao_example_a.qs3");
    let path_b = dir.join("qs3orao_example_b.qs3");
    model.save(&path_a)?;
    let loaded = RankModel::load(&path_a)?;
    loaded.save(&path_b)?;

    let bytes_a = std::fs::read(&path_a)?;
    let bytes_b = std::fs::read(&path_b)?;
    println!("saved {} bytes to {}", bytes_a.len(), path_a.display());
    println!(
        "save -> load -> save reproduces the file byte for byte: {}",
        bytes_a == bytes_b
    );

    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let probes = Array2::from_shape_fn((20, 3), |_| rng.gen_range(-3.0..3.0));
    let original = model.predict_scores(probes.view())?;
    let reloaded = loaded.predict_scores(probes.view())?;
    let identical = original
        .iter()
        .zip(&reloaded)
        .all(|(a, b)| a.to_bits() == b.to_bits());
    println!("loaded model predicts identical bits: {identical}");
    println!(
        "sample scores: {:?}",
        &original[..4.min(original.len())]
    );

    std::fs::remove_file(&path_a).ok();
    std::fs::remove_file(&path_b).ok();
    Ok(())
}
