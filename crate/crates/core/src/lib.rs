//! Multi-instance multi-label (MIML) learning toolkit.
//!
//! A case is a bag of instances (fixed-dimension feature vectors) together
//! with a set of labels drawn from a fixed vocabulary. The crate provides:
//!
//! - [`bag`] and [`distance`]: the data model and Hausdorff bag distances,
//! - [`baselearn`]: SMO-trained RBF SVMs, k-medoids, k-means and ridge regression,
//! - [`learners`]: MIML-kNN, MIMLRBF, MIMLSVM, MIMLBOOST, M3MIML and KISAR,
//! - [`metrics`]: hamming loss, one-error, coverage, ranking loss, average precision,
//! - [`features`]: RGB → optical density → hematoxylin channel → LBP-8 histogram,
//! - [`harness`]: dataset I/O, synthetic data, stratified splits, benchmarks, reports.
//!
//! Data-parallel inner loops (distance matrices, Gram matrices, batch
//! prediction) run on rayon when the `parallel` feature is enabled and fall
//! back to plain iteration otherwise. Both paths produce bit-identical results.

pub mod bag;
pub mod baselearn;
pub mod distance;
pub mod error;
pub mod exec;
pub mod features;
pub mod fixtures;
pub mod harness;
pub mod learners;
pub mod metrics;

pub use bag::{Bag, Case, FeatureVector, LabelSet, Manifest, MimlDataset, Violation, ViolationKind};
pub use distance::{BagDistance, DistanceMatrix};
pub use error::{MimlError, Result};
pub use exec::Execution;
pub use learners::{predict, train, Algorithm, AlgorithmParams, Prediction, TrainedModel};
pub use metrics::EvalReport;
