//! Binary soft-margin SVM trained by sequential minimal optimization.
//!
//! The dual `min ½αᵀQα − eᵀα` s.t. `yᵀα = 0`, `0 ≤ αᵢ ≤ Cᵢ` is solved by
//! two-coordinate updates on the maximal-violating pair with second-order
//! working-set selection. Training stops once the KKT gap `m(α) − M(α)`
//! drops below `tol`, which bounds every per-point KKT violation by `tol`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kernel::{Gram, KernelSpec};
use crate::error::{MimlError, Result};
use crate::exec::Execution;

/// Default KKT tolerance.
pub const SVM_TOL: f64 = 1e-3;

const TAU: f64 = 1e-12;
const MAX_PASSES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `αᵢ·yᵢ` per support vector.
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub cost: f64,
    pub dim: usize,
    /// Set when training saw a single class; the model is then the constant `bias`.
    pub degenerate: bool,
}

impl SvmModel {
    pub fn constant(bias: f64, kernel: KernelSpec, cost: f64, dim: usize) -> Self {
        SvmModel {
            support_vectors: Vec::new(),
            dual_coef: Vec::new(),
            bias,
            kernel,
            cost,
            dim,
            degenerate: true,
        }
    }

    pub(crate) fn margin_unchecked(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coef)
            .map(|(sv, c)| c * self.kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

/// `Σ αᵢyᵢ k(svᵢ, x) + b`
pub fn svm_margin(m: &SvmModel, x: &[f64]) -> Result<f64> {
    if x.len() != m.dim {
        return Err(MimlError::DimensionMismatch {
            expected: m.dim,
            found: x.len(),
        });
    }
    Ok(m.margin_unchecked(x))
}

/// Full dual state at termination.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// Decision values `f(xᵢ)` on the training points.
    pub decision: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn check_labels(ys: &[f64]) -> Result<()> {
    if let Some(y) = ys.iter().find(|&&y| y != 1.0 && y != -1.0) {
        return Err(MimlError::invalid(format!("SVM labels must be ±1, got {y}")));
    }
    Ok(())
}

/// Runs SMO on a prepared Gram matrix with per-point box bounds `upper`.
pub fn solve_dual<X: AsRef<[f64]> + Sync>(
    gram: &Gram<'_, X>,
    ys: &[f64],
    upper: &[f64],
    tol: f64,
    seed: u64,
) -> Result<DualSolution> {
    let n = gram.len();
    if ys.len() != n || upper.len() != n {
        return Err(MimlError::invalid("SVM inputs have inconsistent lengths"));
    }
    check_labels(ys)?;
    if let Some(c) = upper.iter().find(|&&c| !(c > 0.0 && c.is_finite())) {
        return Err(MimlError::invalid(format!("SVM cost must be > 0, got {c}")));
    }
    if !(tol > 0.0) {
        return Err(MimlError::invalid("SVM tolerance must be > 0"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let diag: Vec<f64> = (0..n).map(|i| gram.diag(i)).collect();

    let in_up = |a: f64, y: f64, c: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let in_low = |a: f64, y: f64, c: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

    let max_iter = (MAX_PASSES * n).max(10_000);
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let mut g_max = f64::NEG_INFINITY;
        let mut sel_i = None;
        for &t in &order {
            if in_up(alpha[t], ys[t], upper[t]) {
                let v = -ys[t] * grad[t];
                if v > g_max {
                    g_max = v;
                    sel_i = Some(t);
                }
            }
        }
        let Some(i) = sel_i else {
            converged = true;
            break;
        };
        let k_i = gram.row(i);

        let mut g_min = f64::INFINITY;
        let mut best_obj = f64::INFINITY;
        let mut sel_j = None;
        for &t in &order {
            if in_low(alpha[t], ys[t], upper[t]) {
                let v = -ys[t] * grad[t];
                g_min = g_min.min(v);
                let b = g_max - v;
                if b > 0.0 {
                    let mut a = diag[i] + diag[t] - 2.0 * k_i[t];
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let obj = -(b * b) / a;
                    if obj < best_obj {
                        best_obj = obj;
                        sel_j = Some(t);
                    }
                }
            }
        }
        let j = match sel_j {
            Some(j) if g_max - g_min >= tol => j,
            _ => {
                converged = true;
                break;
            }
        };
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let k_j = gram.row(j);
        let (yi, yj) = (ys[i], ys[j]);
        let (ci, cj) = (upper[i], upper[j]);
        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let q_ij = yi * yj * k_i[j];

        if yi != yj {
            let mut quad = diag[i] + diag[j] + 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let mut quad = diag[i] + diag[j] - 2.0 * q_ij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let d_ai = alpha[i] - old_ai;
        let d_aj = alpha[j] - old_aj;
        for k in 0..n {
            grad[k] += ys[k] * (yi * k_i[k] * d_ai + yj * k_j[k] * d_aj);
        }
    }

    let bias = -compute_rho(&alpha, &grad, ys, upper);
    let decision = (0..n).map(|k| ys[k] * (grad[k] + 1.0) + bias).collect();
    Ok(DualSolution {
        alpha,
        bias,
        decision,
        iterations,
        converged,
    })
}

fn compute_rho(alpha: &[f64], grad: &[f64], ys: &[f64], upper: &[f64]) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut n_free = 0usize;
    let mut sum_free = 0.0;
    for k in 0..alpha.len() {
        let yg = ys[k] * grad[k];
        if alpha[k] >= upper[k] {
            if ys[k] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[k] <= 0.0 {
            if ys[k] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else if lb.is_finite() {
        lb
    } else {
        0.0
    }
}

fn single_class(ys: &[f64]) -> Option<f64> {
    let first = *ys.first()?;
    ys.iter().all(|&y| y == first).then_some(first)
}

fn model_from_solution<X: AsRef<[f64]>>(
    xs: &[X],
    ys: &[f64],
    sol: &DualSolution,
    kernel: KernelSpec,
    cost: f64,
    dim: usize,
) -> SvmModel {
    let mut support_vectors = Vec::new();
    let mut dual_coef = Vec::new();
    for (k, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(xs[k].as_ref().to_vec());
            dual_coef.push(a * ys[k]);
        }
    }
    SvmModel {
        support_vectors,
        dual_coef,
        bias: sol.bias,
        kernel,
        cost,
        dim,
        degenerate: false,
    }
}

fn check_points<X: AsRef<[f64]>>(xs: &[X], ys: &[f64]) -> Result<usize> {
    if xs.len() != ys.len() {
        return Err(MimlError::invalid(format!(
            "{} points but {} labels",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(MimlError::invalid("SVM training needs at least two points"));
    }
    check_labels(ys)?;
    Ok(xs[0].as_ref().len())
}

/// Trains a binary RBF SVM with uniform cost `cost`.
///
/// A single-class input yields a constant model (`bias = ±1`) flagged
/// `degenerate` instead of an error.
pub fn train_binary_svm<X: AsRef<[f64]> + Sync>(
    xs: &[X],
    ys: &[f64],
    kernel: KernelSpec,
    cost: f64,
    tol: f64,
    seed: u64,
) -> Result<SvmModel> {
    train_weighted_svm(xs, ys, None, kernel, cost, tol, seed)
}

/// As [`train_binary_svm`] with per-point cost `cost · weightᵢ`.
pub fn train_weighted_svm<X: AsRef<[f64]> + Sync>(
    xs: &[X],
    ys: &[f64],
    weights: Option<&[f64]>,
    kernel: KernelSpec,
    cost: f64,
    tol: f64,
    seed: u64,
) -> Result<SvmModel> {
    let dim = check_points(xs, ys)?;
    if !(cost > 0.0 && cost.is_finite()) {
        return Err(MimlError::invalid(format!("SVM cost must be > 0, got {cost}")));
    }
    if let Some(y) = single_class(ys) {
        return Ok(SvmModel::constant(y, kernel, cost, dim));
    }
    let gram = Gram::new(xs, kernel, Execution::default())?;
    let upper: Vec<f64> = match weights {
        Some(w) if w.len() == xs.len() => w.iter().map(|w| cost * w).collect(),
        Some(_) => return Err(MimlError::invalid("weight vector length mismatch")),
        None => vec![cost; xs.len()],
    };
    let sol = solve_dual(&gram, ys, &upper, tol, seed)?;
    Ok(model_from_solution(xs, ys, &sol, kernel, cost, dim))
}

/// Trains on an existing Gram matrix, returning the model together with the
/// training decision values.
pub(crate) fn train_on_gram<X: AsRef<[f64]> + Sync>(
    gram: &Gram<'_, X>,
    ys: &[f64],
    upper: &[f64],
    cost: f64,
    tol: f64,
    seed: u64,
) -> Result<(SvmModel, Vec<f64>)> {
    let xs = gram.points();
    let dim = check_points(xs, ys)?;
    if let Some(y) = single_class(ys) {
        let m = SvmModel::constant(y, gram.kernel(), cost, dim);
        return Ok((m, vec![y; ys.len()]));
    }
    let sol = solve_dual(gram, ys, upper, tol, seed)?;
    let model = model_from_solution(xs, ys, &sol, gram.kernel(), cost, dim);
    Ok((model, sol.decision))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rbf1() -> KernelSpec {
        KernelSpec::rbf(1.0).unwrap()
    }

    #[test]
    fn two_point_symmetric_problem() {
        let xs = vec![vec![-1.0], vec![1.0]];
        let ys = [-1.0, 1.0];
        let m = train_binary_svm(&xs, &ys, rbf1(), 1.0, SVM_TOL, 7).unwrap();
        // Unconstrained optimum α = 1/(1 − e⁻⁴) > C, so both multipliers clip to C.
        assert!(m.bias.abs() < 1e-12);
        assert_eq!(m.dual_coef.len(), 2);
        for (sv, c) in m.support_vectors.iter().zip(&m.dual_coef) {
            assert_eq!(c.abs(), 1.0);
            assert_eq!(c.signum(), sv[0].signum());
        }
        assert!(svm_margin(&m, &[-1.0]).unwrap() < 0.0);
        assert!(svm_margin(&m, &[1.0]).unwrap() > 0.0);
        // f(1) = 1 − e⁻⁴
        assert!((svm_margin(&m, &[1.0]).unwrap() - (1.0 - (-4f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn single_class_is_degenerate() {
        let xs = vec![vec![0.0], vec![1.0], vec![2.0]];
        let m = train_binary_svm(&xs, &[1.0, 1.0, 1.0], rbf1(), 1.0, SVM_TOL, 0).unwrap();
        assert!(m.degenerate);
        assert!(svm_margin(&m, &[10.0]).unwrap() > 0.0);
        let n = train_binary_svm(&xs, &[-1.0; 3], rbf1(), 1.0, SVM_TOL, 0).unwrap();
        assert!(svm_margin(&n, &[0.5]).unwrap() < 0.0);
    }

    #[test]
    fn conflicting_duplicates_hit_the_bound() {
        let xs = vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![3.0, 3.0], vec![-3.0, -3.0]];
        let ys = [1.0, -1.0, 1.0, -1.0];
        let gram = Gram::new(&xs, rbf1(), Execution::Sequential).unwrap();
        let sol = solve_dual(&gram, &ys, &[1.0; 4], SVM_TOL, 3).unwrap();
        assert!(sol.converged);
        assert_eq!(sol.alpha[0], 1.0);
        assert_eq!(sol.alpha[1], 1.0);
    }

    #[test]
    fn empty_model_is_its_bias() {
        let m = SvmModel {
            support_vectors: vec![],
            dual_coef: vec![],
            bias: 0.5,
            kernel: rbf1(),
            cost: 1.0,
            dim: 2,
            degenerate: false,
        };
        assert_eq!(svm_margin(&m, &[3.0, -9.0]).unwrap(), 0.5);
        assert!(svm_margin(&m, &[3.0]).is_err());
    }

    #[test]
    fn margin_is_continuous() {
        let xs = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![1.0, 0.2]];
        let m = train_binary_svm(&xs, &[1.0, -1.0, 1.0, -1.0], rbf1(), 1.0, SVM_TOL, 1).unwrap();
        let base = svm_margin(&m, &[0.4, 0.4]).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-3, 1e-5, 1e-7] {
            let d = (svm_margin(&m, &[0.4 + eps, 0.4]).unwrap() - base).abs();
            assert!(d <= prev);
            prev = d;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn input_errors() {
        let xs = vec![vec![0.0], vec![1.0]];
        assert!(train_binary_svm(&xs, &[1.0], rbf1(), 1.0, SVM_TOL, 0).is_err());
        assert!(train_binary_svm(&xs, &[1.0, 0.0], rbf1(), 1.0, SVM_TOL, 0).is_err());
        assert!(train_binary_svm(&xs, &[1.0, -1.0], rbf1(), 0.0, SVM_TOL, 0).is_err());
        assert!(train_binary_svm(&xs[..1], &[1.0], rbf1(), 1.0, SVM_TOL, 0).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let xs: Vec<Vec<f64>> = (0..30).map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()]).collect();
        let ys: Vec<f64> = (0..30).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let a = train_binary_svm(&xs, &ys, rbf1(), 1.0, SVM_TOL, 42).unwrap();
        let b = train_binary_svm(&xs, &ys, rbf1(), 1.0, SVM_TOL, 42).unwrap();
        assert_eq!(a, b);
    }
}
