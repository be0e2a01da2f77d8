//! Ridge-regularized least squares through a thin SVD.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{MimlError, Result};

/// λ used when a caller asks for plain least squares.
pub const PLAIN_LEAST_SQUARES_LAMBDA: f64 = 1e-6;

/// `y = W x + bias`, with `W` stored row-major as `out_dim × in_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LinearMap {
    pub fn out_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn in_dim(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim() {
            return Err(MimlError::DimensionMismatch {
                expected: self.in_dim(),
                found: x.len(),
            });
        }
        Ok(self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b)
            .collect())
    }
}

fn to_matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != p) {
        return Err(MimlError::invalid(format!("{what} is ragged")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(MimlError::invalid(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
}

/// Minimizes `‖Φ Wᵀ − T‖² + λ‖W‖²` for `Φ: n×p`, `T: n×q`; returns `W: q×p`
/// with zero bias. With λ = 0 this is the minimum-norm least-squares solution.
pub fn ridge_solve(phi: &[Vec<f64>], targets: &[Vec<f64>], lambda: f64) -> Result<LinearMap> {
    if phi.is_empty() {
        return Err(MimlError::invalid("ridge_solve needs at least one row"));
    }
    if phi.len() != targets.len() {
        return Err(MimlError::invalid(format!(
            "design has {} rows but targets have {}",
            phi.len(),
            targets.len()
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(MimlError::invalid(format!("ridge λ must be >= 0, got {lambda}")));
    }
    let a = to_matrix(phi, "design matrix")?;
    let t = to_matrix(targets, "target matrix")?;
    let (p, q) = (a.ncols(), t.ncols());
    if p == 0 {
        return Err(MimlError::invalid("design matrix has no columns"));
    }

    let svd = a.svd(true, true);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let s = &svd.singular_values;
    let s_max = s.iter().cloned().fold(0.0, f64::max);
    let cutoff = s_max * f64::EPSILON * (phi.len().max(p) as f64);
    let shrink: Vec<f64> = s
        .iter()
        .map(|&s| if lambda == 0.0 && s <= cutoff { 0.0 } else { s / (s * s + lambda) })
        .collect();

    // Wᵀ = V diag(shrink) Uᵀ T
    let ut_t = u.transpose() * &t;
    let mut scaled = ut_t;
    for (r, f) in shrink.iter().enumerate() {
        scaled.row_mut(r).scale_mut(*f);
    }
    let w_t = v_t.transpose() * scaled;
    let weights = (0..q).map(|o| (0..p).map(|i| w_t[(i, o)]).collect()).collect();
    Ok(LinearMap {
        weights,
        bias: vec![0.0; q],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(phi: &[Vec<f64>], t: &[Vec<f64>], w: &LinearMap, lambda: f64) -> f64 {
        let a = DMatrix::from_fn(phi.len(), phi[0].len(), |i, j| phi[i][j]);
        let tm = DMatrix::from_fn(t.len(), t[0].len(), |i, j| t[i][j]);
        let wt = DMatrix::from_fn(w.in_dim(), w.out_dim(), |i, j| w.weights[j][i]);
        let r = a.transpose() * (&a * &wt - tm) + wt * lambda;
        r.amax()
    }

    #[test]
    fn scalar_exact_solve() {
        let w = ridge_solve(&[vec![1.0]], &[vec![2.0]], 0.0).unwrap();
        assert!((w.weights[0][0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_design_halves_targets() {
        let phi = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let t = vec![vec![3.0, -1.0], vec![0.5, 4.0]];
        let w = ridge_solve(&phi, &t, 1.0).unwrap();
        // W' = T/2, W = (T/2)ᵀ
        for i in 0..2 {
            for o in 0..2 {
                assert!((w.weights[o][i] - t[i][o] / 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_targets_give_zero_weights() {
        let phi = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 7.0]];
        let t = vec![vec![0.0]; 3];
        for lambda in [0.0, 1e-6, 3.0] {
            let w = ridge_solve(&phi, &t, lambda).unwrap();
            assert!(w.weights.iter().flatten().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn normal_equation_residual_vanishes() {
        let phi: Vec<Vec<f64>> = (0..12).map(|i| (0..4).map(|j| ((i * 7 + j * 3) as f64).sin()).collect()).collect();
        let t: Vec<Vec<f64>> = (0..12).map(|i| vec![(i as f64).cos(), if i % 2 == 0 { 1.0 } else { -1.0 }]).collect();
        for lambda in [0.0, 1e-6, 0.5] {
            let w = ridge_solve(&phi, &t, lambda).unwrap();
            assert!(residual(&phi, &t, &w, lambda) < 1e-6);
        }
    }

    #[test]
    fn rank_deficient_design_is_handled() {
        let phi = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let t = vec![vec![1.0], vec![2.0], vec![3.0]];
        let w = ridge_solve(&phi, &t, 0.0).unwrap();
        assert!((w.weights[0][0] - 0.5).abs() < 1e-12);
        assert!((w.weights[0][1] - 0.5).abs() < 1e-12);
        let w = ridge_solve(&phi, &t, PLAIN_LEAST_SQUARES_LAMBDA).unwrap();
        assert!(residual(&phi, &t, &w, PLAIN_LEAST_SQUARES_LAMBDA) < 1e-6);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(ridge_solve(&[vec![f64::NAN]], &[vec![1.0]], 0.0).is_err());
        assert!(ridge_solve(&[vec![1.0]], &[vec![f64::INFINITY]], 0.0).is_err());
        assert!(ridge_solve(&[], &[], 0.0).is_err());
    }

    #[test]
    fn apply_checks_dims() {
        let m = LinearMap { weights: vec![vec![1.0, 2.0]], bias: vec![0.5] };
        assert_eq!(m.apply(&[1.0, 1.0]).unwrap(), vec![3.5]);
        assert!(m.apply(&[1.0]).is_err());
    }
}
