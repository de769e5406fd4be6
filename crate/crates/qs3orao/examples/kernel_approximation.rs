//! Shows how the random Fourier feature estimate of the Gaussian kernel
//! tightens as the number of frequencies grows.
//!
//! For each block size m, the dot product of two feature vectors estimates
//! exp(-sigma * ||x - y||^2); the error over random pairs shrinks like
//! 1/sqrt(m).

use ndarray::Array1;
use qs3orao::features::{feature_map, kernel_exact, FeatureStream};
use qs3orao::KernelSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> qs3orao::Result<()> {
    let d = 5;
    let sigma = 1.0;
    let spec = KernelSpec::new(sigma, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(21);

    let pairs: Vec<(Array1<f64>, Array1<f64>)> = (0..200)
        .map(|_| {
            let x = Array1::from_shape_fn(d, |_| rng.gen_range(-1.0..1.0));
            let y = Array1::from_shape_fn(d, |_| rng.gen_range(-1.0..1.0));
            (x, y)
        })
        .collect();

    println!("sigma {sigma}, {} random pairs in {d} dimensions", pairs.len());
    println!("{:>8} {:>12} {:>12}", "m", "mean |err|", "max |err|");
    for &m in &[16usize, 64, 256, 1_024, 4_096] {
        let stream = FeatureStream::new(21, m, spec.clone())?;
        let omega = stream.sample_omega_block(1);
        let mut sum = 0.0;
        let mut max: f64 = 0.0;
        for (x, y) in &pairs {
            let exact = kernel_exact(&spec, x.view(), y.view())?;
            let phi_x = feature_map(omega.view(), x.view())?;
            let phi_y = feature_map(omega.view(), y.view())?;
            let est: f64 = phi_x.iter().zip(&phi_y).map(|(a, b)| a * b).sum();
            let err = (est - exact).abs();
            sum += err;
            max = max.max(err);
        }
        println!("{:>8} {:>12.6} {:>12.6}", m, sum / pairs.len() as f64, max);
    }

    let stream = FeatureStream::new(21, 64, spec.clone())?;
    let omega = stream.sample_omega_block(1);
    let x = Array1::from_shape_fn(d, |_| rng.gen_range(-1.0..1.0));
    let phi = feature_map(omega.view(), x.view())?;
    let norm: f64 = phi.iter().map(|v| v * v).sum();
    println!("feature vectors are unit length by construction: ||phi||^2 = {norm:.15}");
    Ok(())
}
