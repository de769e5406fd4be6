//! Measures how fast streamed training approaches the exact batch solution
//! of the same objective.
//!
//! The exact-kernel oracle solves the full problem on a small dataset;
//! streamed runs of increasing length are scored against it at probe
//! points. The mean squared error falls like 1/t, a log-log slope near -1.
//!
//! Requires the oracle feature:
//! `cargo run --release --features oracle --example convergence_rate`

use ndarray::s;
use qs3orao::data::{gaussian_ordinal, SemiSupervisedSplit};
use qs3orao::oracle::{convergence_trace, log_log_slope};
use qs3orao::TrainConfig;

fn main() -> qs3orao::Result<()> {
    let means = [-2.0, 0.0, 2.0];
    let labeled = gaussian_ordinal(&means, 0.7, 20, 1, 51)?;
    let source = gaussian_ordinal(&means, 0.7, 47, 1, 52)?;
    let pool = source.features().slice(s![..140, ..]).to_owned();
    let split = SemiSupervisedSplit::from_parts(labeled, pool, 53)?;

    let config = TrainConfig {
        lambda: 1.0,
        theta: 1.5,
        gamma: vec![0.5],
        m: 8,
        t_max: 1_600,
        batch: 1,
        sigma: 1.0,
        master_seed: 54,
    };
    let checkpoints = [100usize, 400, 1_600];
    println!("solving the exact batch problem, then training at each checkpoint...");
    let trace = convergence_trace(&split, &config, &checkpoints, 3)?;

    println!("{:>8} {:>14}", "t", "mean MSE");
    for (t, mse) in checkpoints.iter().zip(&trace.mean_mse) {
        println!("{t:>8} {mse:>14.6e}");
    }
    let points: Vec<(f64, f64)> = checkpoints
        .iter()
        .zip(&trace.mean_mse)
        .map(|(&t, &mse)| (t as f64, mse))
        .collect();
    println!(
        "log-log slope {:.3} over {} probe points, 3 seeds",
        log_log_slope(&points),
        trace.probe_count
    );
    Ok(())
}
