//! Semi-supervised ordinal AUC optimization with streamed random features.
//!
//! An ordinal problem with classes `1..=k` is decomposed into `k - 1` binary
//! ranking subproblems ("is the label above `j`?"). Each subproblem's AUC
//! risk is estimated from a few labeled rows plus a large unlabeled pool,
//! using the identity that rewrites the labeled-pair risk through
//! positive-vs-unlabeled and unlabeled-vs-negative comparisons. One shared
//! kernel ranking function is trained by stochastic functional gradient
//! descent in random Fourier feature space: every iteration draws a fresh
//! frequency block from a seeded stream, so the model stores one coefficient
//! row per iteration and regenerates frequencies on demand instead of
//! keeping any of them. Ordered thresholds fitted on the trained scores turn
//! ranks into class labels.
//!
//! # Modules
//!
//! * [`data`]: loading, normalization, equal-frequency discretization,
//!   labeled/unlabeled splits, subproblem views.
//! * [`risk`]: pairwise losses and the labeled, unlabeled-recovered, and
//!   mixed AUC risks.
//! * [`features`]: the seeded random-feature stream and exact kernel.
//! * [`trainer`]: the streaming trainer and its configuration.
//! * [`thresholds`]: ordered cut points and label prediction.
//! * [`model`]: the trained model and its checksummed binary file format.
//! * [`eval`]: rank-sum AUC, ordinal metrics, scaling benchmark.
//! * [`oracle`] (feature `oracle`): exact-kernel reference objective,
//!   batch solver, unbiasedness probe, and convergence tracer used by the
//!   test suite and examples.
//! * [`cli`]: the `qs3orao` command-line tool.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! * `train_and_evaluate`: synthesize data, train, inspect metrics.
//! * `kernel_approximation`: random-feature inner products vs the exact
//!   kernel.
//! * `semi_supervised_benefit`: unlabeled data improving test AUC.
//! * `convergence_rate`: probe-point MSE against the batch solution as
//!   training lengthens.
//! * `threshold_fitting`: cut points on skewed score distributions.
//! * `model_persistence`: save, reload, and verify bit-identical scores.
//! * `grid_search`: small cross-validated hyperparameter sweep.
//! * `scaling_benchmark`: training time and coefficient memory as the
//!   unlabeled pool grows.
//!
//! Run one with `cargo run --release --features oracle --example <name>`.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod features;
pub mod model;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod risk;
pub mod thresholds;
pub mod trainer;

pub use data::{DataFormat, OrdinalDataset, SemiSupervisedSplit};
pub use error::{Error, Result};
pub use eval::Metrics;
pub use features::KernelSpec;
pub use model::RankModel;
pub use thresholds::Thresholds;
pub use trainer::{train, train_with_progress, TrainConfig};
