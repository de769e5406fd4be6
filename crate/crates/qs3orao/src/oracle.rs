//! Exact-kernel reference implementations used to audit the streamed trainer.
//!
//! Everything here is quadratic in the sample count and exists only to check
//! the fast path: an exact representer-weight objective and gradient, a
//! deterministic batch solver, a Monte Carlo unbiasedness probe for the
//! random-feature estimator, and a convergence tracer that measures trained
//! models against the batch solution. Compiled only with the `oracle`
//! feature, which the test and example targets enable.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::SemiSupervisedSplit;
use crate::error::{Error, Result};
use crate::features::{feature_map, kernel_exact, FeatureStream, KernelSpec};
use crate::trainer::{train, TrainConfig};

/// Upper bound on sample count for the quadratic-memory oracle paths.
pub const ORACLE_SAMPLE_LIMIT: usize = 500;

/// A kernel expansion `f(x) = sum_i w_i k(x_i, x)` held explicitly.
#[derive(Debug, Clone)]
pub struct ExactFunction {
    anchors: Array2<f64>,
    weights: Vec<f64>,
    spec: KernelSpec,
}

impl ExactFunction {
    pub fn new(anchors: Array2<f64>, weights: Vec<f64>, spec: KernelSpec) -> Result<Self> {
        if anchors.nrows() != weights.len() {
            return Err(Error::InvalidData(format!(
                "{} anchors but {} weights",
                anchors.nrows(),
                weights.len()
            )));
        }
        if anchors.ncols() != spec.d() {
            return Err(Error::InvalidData(format!(
                "anchors have {} columns but the kernel expects {}",
                anchors.ncols(),
                spec.d()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidData("non-finite weight".into()));
        }
        Ok(Self {
            anchors,
            weights,
            spec,
        })
    }

    pub fn anchors(&self) -> &Array2<f64> {
        &self.anchors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn eval(&self, x: ArrayView1<f64>) -> Result<f64> {
        let mut acc = 0.0;
        for (row, &w) in self.anchors.rows().into_iter().zip(&self.weights) {
            acc += w * kernel_exact(&self.spec, row, x)?;
        }
        Ok(acc)
    }

    pub fn eval_many(&self, xs: ArrayView2<f64>) -> Result<Vec<f64>> {
        xs.rows().into_iter().map(|x| self.eval(x)).collect()
    }

    /// Squared norm in the kernel's function space, `w' K w`.
    pub fn norm_sq(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (i, xi) in self.anchors.rows().into_iter().enumerate() {
            for (j, xj) in self.anchors.rows().into_iter().enumerate() {
                acc += self.weights[i] * self.weights[j] * kernel_exact(&self.spec, xi, xj)?;
            }
        }
        Ok(acc)
    }
}

/// The regularized pairwise objective held exactly on one split.
///
/// Anchors are the labeled rows followed by the unlabeled rows; candidate
/// functions are weight vectors over those anchors. The objective matches
/// what the streamed trainer samples: squared pair loss, per-subproblem
/// gamma mixing, mean over subproblems, plus `lambda / 2` times the squared
/// function norm.
pub struct ExactProblem {
    points: Array2<f64>,
    labels: Vec<usize>,
    n_labeled: usize,
    k: usize,
    lambda: f64,
    gamma: Vec<f64>,
    spec: KernelSpec,
    gram: Array2<f64>,
}

impl ExactProblem {
    pub fn new(
        split: &SemiSupervisedSplit,
        sigma: f64,
        lambda: f64,
        gamma: &[f64],
    ) -> Result<Self> {
        let n_l = split.labeled().len();
        let n_u = split.n_unlabeled();
        let n = n_l + n_u;
        if n > ORACLE_SAMPLE_LIMIT {
            return Err(Error::InvalidConfig(format!(
                "exact oracle holds an {n} x {n} kernel matrix; limit is {ORACLE_SAMPLE_LIMIT}"
            )));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        let k = split.k();
        if gamma.len() != k - 1 {
            return Err(Error::InvalidConfig(format!(
                "{} gamma values for {} subproblems",
                gamma.len(),
                k - 1
            )));
        }
        let mut gamma = gamma.to_vec();
        if n_u == 0 {
            gamma.iter_mut().for_each(|g| *g = 1.0);
        }
        for &g in &gamma {
            if !g.is_finite() || !(0.0..=1.0).contains(&g) {
                return Err(Error::InvalidConfig(format!("gamma {g} outside [0, 1]")));
            }
        }

        let d = split.dim();
        let spec = KernelSpec::new(sigma, d)?;
        let mut points = Array2::zeros((n, d));
        for (i, row) in split.labeled().features().rows().into_iter().enumerate() {
            points.row_mut(i).assign(&row);
        }
        for (i, row) in split.unlabeled_features().rows().into_iter().enumerate() {
            points.row_mut(n_l + i).assign(&row);
        }
        let mut gram = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let v = kernel_exact(&spec, points.row(i), points.row(j))?;
                gram[[i, j]] = v;
                gram[[j, i]] = v;
            }
        }
        Ok(Self {
            points,
            labels: split.labeled().labels().to_vec(),
            n_labeled: n_l,
            k,
            lambda,
            gamma,
            spec,
            gram,
        })
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// Wraps a weight vector as an evaluable function over the anchors.
    pub fn function(&self, weights: &[f64]) -> Result<ExactFunction> {
        ExactFunction::new(self.points.clone(), weights.to_vec(), self.spec.clone())
    }

    fn side_indices(&self, j: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let pos = (0..self.n_labeled)
            .filter(|&i| self.labels[i] > j)
            .collect();
        let neg = (0..self.n_labeled)
            .filter(|&i| self.labels[i] <= j)
            .collect();
        let unl = (self.n_labeled..self.n()).collect();
        (pos, neg, unl)
    }

    fn values(&self, weights: &[f64]) -> Array1<f64> {
        self.gram.dot(&ArrayView1::from(weights))
    }

    /// Objective value at a weight vector.
    pub fn objective(&self, weights: &[f64]) -> Result<f64> {
        self.objective_at(weights, &self.values(weights))
    }

    fn objective_at(&self, weights: &[f64], f: &Array1<f64>) -> Result<f64> {
        if weights.len() != self.n() {
            return Err(Error::InvalidData(format!(
                "{} weights for {} anchors",
                weights.len(),
                self.n()
            )));
        }
        let norm_sq: f64 = weights.iter().zip(f.iter()).map(|(w, v)| w * v).sum();
        let mut risk_sum = 0.0;
        for j in 1..self.k {
            let (pos, neg, unl) = self.side_indices(j);
            let g = self.gamma[j - 1];
            let pn = squared_pair_mean(f, &pos, &neg);
            let mut r = g * pn;
            if g < 1.0 {
                let pu = squared_pair_mean(f, &pos, &unl);
                let nu = squared_pair_mean(f, &unl, &neg);
                r += (1.0 - g) * (pu + nu - 0.5);
            }
            risk_sum += r;
        }
        Ok(self.lambda / 2.0 * norm_sq + risk_sum / (self.k - 1) as f64)
    }

    /// Representer weights of the exact functional gradient at `weights`.
    ///
    /// The returned vector `g` defines the gradient function
    /// `sum_i g_i k(x_i, .)`; consequently the partial derivative of
    /// [`ExactProblem::objective`] in `weights[i]` is `(K g)_i`.
    pub fn gradient_weights(&self, weights: &[f64]) -> Result<Vec<f64>> {
        if weights.len() != self.n() {
            return Err(Error::InvalidData(format!(
                "{} weights for {} anchors",
                weights.len(),
                self.n()
            )));
        }
        let f = self.values(weights);
        let mut g: Vec<f64> = weights.iter().map(|&w| self.lambda * w).collect();
        let scale = 1.0 / (self.k - 1) as f64;
        for j in 1..self.k {
            let (pos, neg, unl) = self.side_indices(j);
            let gam = self.gamma[j - 1];
            if gam > 0.0 {
                add_pair_gradient(&mut g, &f, &pos, &neg, gam * scale);
            }
            if gam < 1.0 && !unl.is_empty() {
                add_pair_gradient(&mut g, &f, &pos, &unl, (1.0 - gam) * scale);
                add_pair_gradient(&mut g, &f, &unl, &neg, (1.0 - gam) * scale);
            }
        }
        Ok(g)
    }

    /// Norm of the gradient in function space, `sqrt(g' K g)`.
    pub fn gradient_norm(&self, gradient_weights: &[f64]) -> f64 {
        let kg = self.values(gradient_weights);
        gradient_weights
            .iter()
            .zip(kg.iter())
            .map(|(g, v)| g * v)
            .sum::<f64>()
            .max(0.0)
            .sqrt()
    }
}

/// Mean of the squared pair loss `(1 - f_a + f_b)^2` over two index sets,
/// through the factored moments of each side.
fn squared_pair_mean(f: &Array1<f64>, first: &[usize], second: &[usize]) -> f64 {
    let n_a = first.len() as f64;
    let n_b = second.len() as f64;
    let m1a = first.iter().map(|&i| f[i]).sum::<f64>() / n_a;
    let m2a = first.iter().map(|&i| f[i] * f[i]).sum::<f64>() / n_a;
    let m1b = second.iter().map(|&i| f[i]).sum::<f64>() / n_b;
    let m2b = second.iter().map(|&i| f[i] * f[i]).sum::<f64>() / n_b;
    1.0 + m2a + m2b - 2.0 * m1a + 2.0 * m1b - 2.0 * m1a * m1b
}

fn add_pair_gradient(g: &mut [f64], f: &Array1<f64>, first: &[usize], second: &[usize], w: f64) {
    let n_a = first.len() as f64;
    let n_b = second.len() as f64;
    let m1a = first.iter().map(|&i| f[i]).sum::<f64>() / n_a;
    let m1b = second.iter().map(|&i| f[i]).sum::<f64>() / n_b;
    for &a in first {
        g[a] += w * (-2.0 / n_a) * (1.0 - f[a] + m1b);
    }
    for &b in second {
        g[b] += w * (2.0 / n_b) * (1.0 - m1a + f[b]);
    }
}

/// Diagnostics from the exact batch solver.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Objective after every accepted step, starting with the initial value.
    pub objectives: Vec<f64>,
    pub initial_grad_norm: f64,
    pub final_grad_norm: f64,
    pub iterations: usize,
}

/// Minimizes the exact objective by gradient descent with backtracking.
///
/// Stops once the function-space gradient norm falls below `tol_rel` times
/// its initial value; errors if `max_iters` accepted steps cannot get there.
pub fn batch_solve_exact(
    problem: &ExactProblem,
    max_iters: usize,
    tol_rel: f64,
) -> Result<(ExactFunction, SolveReport)> {
    let n = problem.n();
    let mut w = vec![0.0; n];
    let mut f = Array1::zeros(n);
    let mut obj = problem.objective_at(&w, &f)?;
    let mut objectives = vec![obj];

    let mut initial_norm = 0.0;
    let mut final_norm;
    let mut step = 1.0;
    let mut iterations = 0;

    loop {
        let g = problem.gradient_weights(&w)?;
        let kg = problem.values(&g);
        let norm_sq: f64 = g.iter().zip(kg.iter()).map(|(a, b)| a * b).sum();
        final_norm = norm_sq.max(0.0).sqrt();
        if iterations == 0 {
            initial_norm = final_norm;
        }
        let target = tol_rel * initial_norm.max(f64::MIN_POSITIVE);
        if final_norm <= target {
            break;
        }
        if iterations >= max_iters {
            return Err(Error::Numeric {
                iteration: iterations,
                msg: format!(
                    "batch solver stalled at gradient norm {final_norm:.3e} (target {target:.3e})"
                ),
            });
        }
        let mut s = step;
        let mut accepted = false;
        for _ in 0..60 {
            let w_try: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - s * gi).collect();
            let f_try = &f - &(s * &kg);
            let obj_try = problem.objective_at(&w_try, &f_try)?;
            if obj_try <= obj - 1e-4 * s * norm_sq {
                w = w_try;
                f = f_try;
                obj = obj_try;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            return Err(Error::Numeric {
                iteration: iterations,
                msg: "backtracking found no descent step".into(),
            });
        }
        step = (s * 2.0).min(4.0);
        objectives.push(obj);
        iterations += 1;
    }

    let report = SolveReport {
        objectives,
        initial_grad_norm: initial_norm,
        final_grad_norm: final_norm,
        iterations,
    };
    Ok((problem.function(&w)?, report))
}

/// Per-anchor loading of the batch gradient estimate, before the
/// `-eta / (k - 1)` scaling the trainer applies.
///
/// `scores` follow the trainer's slot layout: `batch` slots per class in
/// class order, then the unlabeled slots. The streamed update equals
/// `-eta / (k - 1)` times `sum_i c_i phi(x_i)` for these loadings, and its
/// exact-kernel counterpart is `sum_i c_i k(x_i, .)`.
pub fn pair_loadings(scores: &[f64], batch: usize, k: usize, gamma: &[f64]) -> Vec<f64> {
    assert_eq!(gamma.len(), k - 1);
    let labeled_slots = k * batch;
    assert!(scores.len() == labeled_slots || scores.len() > labeled_slots);
    let n = scores.len();
    let mut c = vec![0.0; n];
    let add = |c: &mut Vec<f64>, first: &[usize], second: &[usize], w: f64| {
        let pairs = (first.len() * second.len()) as f64;
        for &a in first {
            for &b in second {
                c[a] += w * (-2.0) * (1.0 - scores[a] + scores[b]) / pairs;
                c[b] += w * 2.0 * (1.0 - scores[a] + scores[b]) / pairs;
            }
        }
    };
    let unl: Vec<usize> = (labeled_slots..n).collect();
    for j in 1..k {
        let g = gamma[j - 1];
        let pos: Vec<usize> = (j * batch..labeled_slots).collect();
        let neg: Vec<usize> = (0..j * batch).collect();
        if g > 0.0 {
            add(&mut c, &pos, &neg, g);
        }
        if g < 1.0 && !unl.is_empty() {
            add(&mut c, &pos, &unl, 1.0 - g);
            add(&mut c, &unl, &neg, 1.0 - g);
        }
    }
    c
}

/// Outcome of the Monte Carlo unbiasedness probe.
#[derive(Debug, Clone)]
pub struct UnbiasednessReport {
    pub per_probe_exact: Vec<f64>,
    pub per_probe_mean: Vec<f64>,
    pub per_probe_se: Vec<f64>,
    pub max_abs_dev: f64,
    /// Largest deviation measured in standard-error units.
    pub max_se_units: f64,
}

/// Checks that the random-feature update matches its exact-kernel
/// counterpart in expectation.
///
/// The pair loadings `c_i` are frozen from `scores`; for each seed a fresh
/// frequency block is drawn and `sum_i c_i phi(x_i)' phi(p)` is evaluated at
/// every probe `p`. Across seeds the mean must approach
/// `sum_i c_i k(x_i, p)`, and the report states how far it lands in
/// standard-error units.
#[allow(clippy::too_many_arguments)]
pub fn mc_unbiasedness_check(
    points: ArrayView2<f64>,
    scores: &[f64],
    batch: usize,
    k: usize,
    gamma: &[f64],
    sigma: f64,
    m: usize,
    n_seeds: u64,
    probes: ArrayView2<f64>,
    master_seed: u64,
) -> Result<UnbiasednessReport> {
    if scores.len() != points.nrows() {
        return Err(Error::InvalidData(format!(
            "{} scores for {} points",
            scores.len(),
            points.nrows()
        )));
    }
    if n_seeds < 2 {
        return Err(Error::InvalidConfig("need at least 2 seeds".into()));
    }
    let spec = KernelSpec::new(sigma, points.ncols())?;
    let c = pair_loadings(scores, batch, k, gamma);

    let n_probes = probes.nrows();
    let mut exact = vec![0.0; n_probes];
    for (p, probe) in probes.rows().into_iter().enumerate() {
        for (i, point) in points.rows().into_iter().enumerate() {
            exact[p] += c[i] * kernel_exact(&spec, point, probe)?;
        }
    }

    let mut sums = vec![0.0; n_probes];
    let mut sum_sqs = vec![0.0; n_probes];
    for s in 0..n_seeds {
        let stream = FeatureStream::new(master_seed.wrapping_add(s), m, spec.clone())?;
        let omega = stream.sample_omega_block(1);
        let mut combined = vec![0.0; 2 * m];
        for (i, point) in points.rows().into_iter().enumerate() {
            let phi = feature_map(omega.view(), point)?;
            for (dst, &v) in combined.iter_mut().zip(&phi) {
                *dst += c[i] * v;
            }
        }
        for (p, probe) in probes.rows().into_iter().enumerate() {
            let phi_p = feature_map(omega.view(), probe)?;
            let est: f64 = combined.iter().zip(&phi_p).map(|(a, b)| a * b).sum();
            sums[p] += est;
            sum_sqs[p] += est * est;
        }
    }

    let s_f = n_seeds as f64;
    let mut means = vec![0.0; n_probes];
    let mut ses = vec![0.0; n_probes];
    let mut max_abs_dev: f64 = 0.0;
    let mut max_se_units: f64 = 0.0;
    for p in 0..n_probes {
        let mean = sums[p] / s_f;
        let var = (sum_sqs[p] / s_f - mean * mean).max(0.0) * s_f / (s_f - 1.0);
        let se = (var / s_f).sqrt();
        let dev = (mean - exact[p]).abs();
        means[p] = mean;
        ses[p] = se;
        max_abs_dev = max_abs_dev.max(dev);
        let units = if se > 0.0 {
            dev / se
        } else if dev <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        max_se_units = max_se_units.max(units);
    }

    Ok(UnbiasednessReport {
        per_probe_exact: exact,
        per_probe_mean: means,
        per_probe_se: ses,
        max_abs_dev,
        max_se_units,
    })
}

/// Uniform probe points over the bounding box of all split rows.
pub fn probe_grid(split: &SemiSupervisedSplit, count: usize, seed: u64) -> Array2<f64> {
    let d = split.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    let mut scan = |rows: ArrayView2<f64>| {
        for row in rows.rows() {
            for (c, &v) in row.iter().enumerate() {
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
    };
    scan(split.labeled().features().view());
    scan(split.unlabeled_features().view());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((count, d), |(_, c)| {
        if hi[c] > lo[c] {
            rng.gen_range(lo[c]..hi[c])
        } else {
            lo[c]
        }
    })
}

/// Mean squared distance to the batch solution at several training lengths.
#[derive(Debug, Clone)]
pub struct ConvergenceTrace {
    pub checkpoints: Vec<usize>,
    /// Mean over seeds of the probe-point MSE at each checkpoint.
    pub mean_mse: Vec<f64>,
    /// `per_seed_mse[s][c]` is seed `s`'s MSE at checkpoint `c`.
    pub per_seed_mse: Vec<Vec<f64>>,
    pub probe_count: usize,
}

/// Trains at each checkpoint length and measures probe-point MSE against
/// the exact batch solution of the same objective.
///
/// Each seed trains from scratch at every checkpoint so every measurement
/// uses the canonical run of that length. The labeled pool should hold
/// equally many rows of each class; the streamed sampler weights classes
/// equally, so unequal pools would converge to a differently weighted
/// objective than the batch solver minimizes.
pub fn convergence_trace(
    split: &SemiSupervisedSplit,
    config: &TrainConfig,
    checkpoints: &[usize],
    n_seeds: u64,
) -> Result<ConvergenceTrace> {
    if checkpoints.is_empty() || n_seeds == 0 {
        return Err(Error::InvalidConfig(
            "need at least one checkpoint and one seed".into(),
        ));
    }
    config.validate()?;
    let gammas = config.resolve_gamma(split.k() - 1)?;
    let problem = ExactProblem::new(split, config.sigma, config.lambda, &gammas)?;
    let (solution, _report) = batch_solve_exact(&problem, 100_000, 1e-7)?;

    const PROBE_SEED: u64 = 0x5052_4f42;
    let probes = probe_grid(split, 50, PROBE_SEED);
    let target = solution.eval_many(probes.view())?;

    let mut per_seed = Vec::with_capacity(n_seeds as usize);
    for s in 0..n_seeds {
        let mut row = Vec::with_capacity(checkpoints.len());
        for &t in checkpoints {
            let cfg = TrainConfig {
                t_max: t,
                master_seed: config.master_seed.wrapping_add(s),
                ..config.clone()
            };
            let model = train(split, &cfg)?;
            let scores = model.predict_scores(probes.view())?;
            let mse = scores
                .iter()
                .zip(&target)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                / target.len() as f64;
            row.push(mse);
        }
        per_seed.push(row);
    }
    let mean_mse = (0..checkpoints.len())
        .map(|c| per_seed.iter().map(|row| row[c]).sum::<f64>() / n_seeds as f64)
        .collect();
    Ok(ConvergenceTrace {
        checkpoints: checkpoints.to_vec(),
        mean_mse,
        per_seed_mse: per_seed,
        probe_count: probes.nrows(),
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
