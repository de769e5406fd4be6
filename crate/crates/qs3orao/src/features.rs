//! Random Fourier features for the Gaussian kernel, regenerated on demand.
//!
//! The kernel is `k(x, x') = exp(-sigma * ||x - x'||^2)`, whose spectral
//! measure is `N(0, 2 * sigma * I)`. Iteration `i` of the optimizer owns one
//! block of `m` frequencies drawn from a seed derived from the master seed
//! and `i` alone, so any block can be regenerated at any time without storing
//! it. Stored models depend on that regeneration, which makes the seed
//! derivation and the draw order below part of the model-file contract.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Gaussian kernel parameters: bandwidth and input dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    sigma: f64,
    d: usize,
}

impl KernelSpec {
    pub fn new(sigma: f64, d: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "kernel bandwidth must be positive and finite, got {sigma}"
            )));
        }
        if d == 0 {
            return Err(Error::InvalidConfig("input dimension must be positive".into()));
        }
        Ok(Self { sigma, d })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn d(&self) -> usize {
        self.d
    }
}

/// Exact Gaussian kernel value `exp(-sigma * ||x - x'||^2)`.
pub fn kernel_exact(spec: &KernelSpec, x: ArrayView1<f64>, y: ArrayView1<f64>) -> Result<f64> {
    if x.len() != spec.d || y.len() != spec.d {
        return Err(Error::InvalidData(format!(
            "kernel inputs must have {} coordinates, got {} and {}",
            spec.d,
            x.len(),
            y.len()
        )));
    }
    let mut sq = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        let diff = a - b;
        sq += diff * diff;
    }
    Ok((-spec.sigma * sq).exp())
}

/// Mixes a master seed and an iteration index into one block seed.
///
/// This is the splitmix64 output at stream position `i`; index 0 is reserved
/// for the batch-sampling stream, frequency blocks use `i >= 1`. The
/// constants are frozen: stored models replay blocks through this function.
pub fn iteration_seed(master_seed: u64, i: u64) -> u64 {
    let mut z = master_seed.wrapping_add(i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A reproducible stream of frequency blocks for one kernel.
#[derive(Debug, Clone)]
pub struct FeatureStream {
    master_seed: u64,
    m: usize,
    spec: KernelSpec,
}

impl FeatureStream {
    pub fn new(master_seed: u64, m: usize, spec: KernelSpec) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig("frequency count m must be positive".into()));
        }
        Ok(Self { master_seed, m, spec })
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// Regenerates the `m x d` frequency block of iteration `i` (1-based).
    ///
    /// The draw is a pure function of `(master_seed, i)`: entries are filled
    /// row by row, left to right, from `N(0, 2 * sigma)` per coordinate.
    pub fn sample_omega_block(&self, i: usize) -> Array2<f64> {
        assert!(i >= 1, "frequency blocks are indexed from 1");
        let seed = iteration_seed(self.master_seed, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, (2.0 * self.spec.sigma).sqrt()).expect("positive sigma");
        let mut block = Array2::zeros((self.m, self.spec.d));
        for r in 0..self.m {
            for c in 0..self.spec.d {
                block[[r, c]] = normal.sample(&mut rng);
            }
        }
        block
    }
}

/// Maps `x` through one frequency block: `2m` entries, the cosine half then
/// the sine half, each scaled by `1/sqrt(m)` so that `||phi(x)|| = 1` and
/// `phi(x) . phi(x')` averages `cos(omega . (x - x'))` over the block.
pub fn feature_map(omega: ArrayView2<f64>, x: ArrayView1<f64>) -> Result<Vec<f64>> {
    let (m, d) = omega.dim();
    if x.len() != d {
        return Err(Error::InvalidData(format!(
            "feature map expects {d} coordinates, got {}",
            x.len()
        )));
    }
    let scale = 1.0 / (m as f64).sqrt();
    let mut phi = vec![0.0; 2 * m];
    for r in 0..m {
        let mut arg = 0.0;
        for c in 0..d {
            arg += omega[[r, c]] * x[c];
        }
        let (sin, cos) = arg.sin_cos();
        phi[r] = scale * cos;
        phi[m + r] = scale * sin;
    }
    Ok(phi)
}

/// Evaluates `sum_i <row_i, phi_{omega_i}(x)>` for every point at once.
///
/// Each frequency block is regenerated exactly once and applied to all
/// points before moving on, with blocks taken in ascending `i`. Within a
/// block the cosine and sine terms of one frequency are folded together and
/// the `1/sqrt(m)` scale is applied once per block; every caller in the
/// crate scores through this routine, so training-time scores and stored
/// model scores agree to the last bit.
pub(crate) fn score_points(
    stream: &FeatureStream,
    coefficients: &[f64],
    t: usize,
    points: ArrayView2<f64>,
) -> Result<Vec<f64>> {
    let m = stream.m();
    let d = stream.spec().d();
    let width = 2 * m;
    if coefficients.len() != t * width {
        return Err(Error::InvalidData(format!(
            "coefficient buffer holds {} values, expected {} rows of {}",
            coefficients.len(),
            t,
            width
        )));
    }
    if points.ncols() != d {
        return Err(Error::InvalidData(format!(
            "points have {} coordinates, kernel expects {d}",
            points.ncols()
        )));
    }
    let n = points.nrows();
    let mut scores = vec![0.0; n];
    let scale = 1.0 / (m as f64).sqrt();
    let mut args = vec![0.0; m];
    for i in 1..=t {
        let omega = stream.sample_omega_block(i);
        let row = &coefficients[(i - 1) * width..i * width];
        let (cos_row, sin_row) = row.split_at(m);
        for (p, score) in scores.iter_mut().enumerate() {
            let x = points.row(p);
            for (r, arg) in args.iter_mut().enumerate() {
                let mut acc = 0.0;
                for c in 0..d {
                    acc += omega[[r, c]] * x[c];
                }
                *arg = acc;
            }
            let mut acc = 0.0;
            for r in 0..m {
                let (sin, cos) = args[r].sin_cos();
                acc += cos_row[r] * cos + sin_row[r] * sin;
            }
            *score += scale * acc;
        }
    }
    Ok(scores)
}
