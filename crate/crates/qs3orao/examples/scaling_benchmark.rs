//! Benchmarks training against growing unlabeled pools.
//!
//! Training touches the pool only through fixed-size batches, so wall time
//! per run stays flat and coefficient memory is identical across pool
//! sizes. The output is the same CSV the bench subcommand writes.

use qs3orao::data::gaussian_ordinal;
use qs3orao::eval::{bench_rows_to_csv, bench_scaling};
use qs3orao::TrainConfig;

fn main() -> qs3orao::Result<()> {
    let ds = gaussian_ordinal(&[-1.5, 0.0, 1.5], 0.6, 5_100, 4, 55)?;
    let config = TrainConfig {
        m: 16,
        t_max: 100,
        batch: 4,
        sigma: 0.5,
        master_seed: 55,
        ..TrainConfig::default()
    };
    println!(
        "timing {} iterations at several pool sizes, 3 repeats each",
        config.t_max
    );
    let rows = bench_scaling(&ds, &config, 150, &[1_000, 5_000, 15_000], 3)?;
    print!("{}", bench_rows_to_csv(&rows));

    let all_equal = rows
        .windows(2)
        .all(|w| w[0].peak_coeff_bytes == w[1].peak_coeff_bytes);
    println!("\ncoefficient memory independent of pool size: {all_equal}");
    Ok(())
}
