use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::distance::{squared_euclidean, squared_euclidean_unchecked};
use crate::error::{MimlError, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[default]
    Rbf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub gamma: f64,
}

impl KernelSpec {
    pub fn rbf(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(MimlError::invalid(format!("kernel gamma must be > 0, got {gamma}")));
        }
        Ok(KernelSpec {
            kind: KernelKind::Rbf,
            gamma,
        })
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Rbf => (-self.gamma * squared_euclidean_unchecked(x, y)).exp(),
        }
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        KernelSpec {
            kind: KernelKind::Rbf,
            gamma: 1.0,
        }
    }
}

/// `exp(−γ‖x − y‖²)`
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    let spec = KernelSpec::rbf(gamma)?;
    Ok((-spec.gamma * squared_euclidean(x, y)?).exp())
}

/// Kernel matrix over a training set. Small sets are materialized densely;
/// larger ones compute rows on demand.
pub struct Gram<'a, X> {
    xs: &'a [X],
    kernel: KernelSpec,
    dense: Option<Vec<f64>>,
}

impl<'a, X: AsRef<[f64]> + Sync> Gram<'a, X> {
    pub const DENSE_LIMIT: usize = 6000;

    pub fn new(xs: &'a [X], kernel: KernelSpec, exec: Execution) -> Result<Self> {
        if let Some(first) = xs.first() {
            let dim = first.as_ref().len();
            if let Some(bad) = xs.iter().find(|x| x.as_ref().len() != dim) {
                return Err(MimlError::DimensionMismatch {
                    expected: dim,
                    found: bad.as_ref().len(),
                });
            }
        }
        let n = xs.len();
        let dense = (n <= Self::DENSE_LIMIT).then(|| {
            let mut k = vec![0.0; n * n];
            exec.for_each_row(&mut k, n, |i, row| {
                let xi = xs[i].as_ref();
                for (j, v) in row.iter_mut().enumerate() {
                    *v = kernel.eval_unchecked(xi, xs[j].as_ref());
                }
            });
            k
        });
        Ok(Gram { xs, kernel, dense })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn points(&self) -> &'a [X] {
        self.xs
    }

    pub fn row(&self, i: usize) -> Cow<'_, [f64]> {
        let n = self.xs.len();
        match &self.dense {
            Some(k) => Cow::Borrowed(&k[i * n..(i + 1) * n]),
            None => {
                let xi = self.xs[i].as_ref();
                Cow::Owned(
                    self.xs
                        .iter()
                        .map(|x| self.kernel.eval_unchecked(xi, x.as_ref()))
                        .collect(),
                )
            }
        }
    }

    pub fn diag(&self, i: usize) -> f64 {
        let x = self.xs[i].as_ref();
        self.kernel.eval_unchecked(x, x)
    }
}
