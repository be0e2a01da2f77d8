//! Numerical building blocks shared by the MIML learners.

pub mod cluster;
pub mod kernel;
pub mod ridge;
pub mod svm;

pub use cluster::{k_means, k_medoids, KMeans, Medoids};
pub use kernel::{rbf_kernel, Gram, KernelKind, KernelSpec};
pub use ridge::{ridge_solve, LinearMap, PLAIN_LEAST_SQUARES_LAMBDA};
pub use svm::{solve_dual, svm_margin, train_binary_svm, train_weighted_svm, DualSolution, SvmModel, SVM_TOL};
