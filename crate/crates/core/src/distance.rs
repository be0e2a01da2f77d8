//! Instance and bag distances shared by every distance-based learner.

use serde::{Deserialize, Serialize};

use crate::bag::{Bag, FeatureVector};
use crate::error::{MimlError, Result};
use crate::exec::Execution;

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(MimlError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn squared_euclidean_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn squared_euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    check_dims(a, b)?;
    Ok(squared_euclidean_unchecked(a, b))
}

/// `‖a − b‖₂`
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    squared_euclidean(a, b).map(f64::sqrt)
}

/// `min_{b ∈ set} ‖x − b‖₂`
pub fn min_point_set_distance(x: &[f64], set: &[FeatureVector]) -> Result<f64> {
    if set.is_empty() {
        return Err(MimlError::invalid("point-set distance to an empty set"));
    }
    let mut best = f64::INFINITY;
    for b in set {
        best = best.min(squared_euclidean(x, b)?);
    }
    Ok(best.sqrt())
}

/// Row-wise and column-wise minima of the squared cross-distance table,
/// square-rooted.
fn directed_minima(a: &[FeatureVector], b: &[FeatureVector]) -> Result<(Vec<f64>, Vec<f64>)> {
    if a.is_empty() || b.is_empty() {
        return Err(MimlError::invalid("Hausdorff distance with an empty bag"));
    }
    check_dims(&a[0], &b[0])?;
    let mut row_min = vec![f64::INFINITY; a.len()];
    let mut col_min = vec![f64::INFINITY; b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            let d = squared_euclidean(x, y)?;
            if d < row_min[i] {
                row_min[i] = d;
            }
            if d < col_min[j] {
                col_min[j] = d;
            }
        }
    }
    row_min.iter_mut().for_each(|d| *d = d.sqrt());
    col_min.iter_mut().for_each(|d| *d = d.sqrt());
    Ok((row_min, col_min))
}

/// Average Hausdorff distance:
/// `(Σ_a min_b d(a,b) + Σ_b min_a d(a,b)) / (|A| + |B|)`.
pub fn avg_hausdorff(a: &[FeatureVector], b: &[FeatureVector]) -> Result<f64> {
    let (ra, cb) = directed_minima(a, b)?;
    let total: f64 = ra.iter().sum::<f64>() + cb.iter().sum::<f64>();
    Ok(total / (a.len() + b.len()) as f64)
}

/// Maximal Hausdorff distance:
/// `max(max_a min_b d(a,b), max_b min_a d(a,b))`.
pub fn max_hausdorff(a: &[FeatureVector], b: &[FeatureVector]) -> Result<f64> {
    let (ra, cb) = directed_minima(a, b)?;
    Ok(ra.iter().chain(cb.iter()).fold(0.0, |m, &d| m.max(d)))
}

/// Which Hausdorff variant a learner uses between bags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BagDistance {
    #[default]
    Average,
    Max,
}

impl BagDistance {
    pub fn between(self, a: &[FeatureVector], b: &[FeatureVector]) -> Result<f64> {
        match self {
            BagDistance::Average => avg_hausdorff(a, b),
            BagDistance::Max => max_hausdorff(a, b),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "avg" | "average" => Ok(BagDistance::Average),
            "max" => Ok(BagDistance::Max),
            other => Err(MimlError::invalid(format!("unknown bag distance `{other}`"))),
        }
    }
}

/// Dense row-major distance table between two bag lists.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Symmetric `n × n` table over `bags`. Each unordered pair is computed
    /// once; the diagonal is exactly zero.
    pub fn pairwise(bags: &[&Bag], metric: BagDistance, exec: Execution) -> Result<Self> {
        let n = bags.len();
        check_uniform(bags)?;
        let upper = exec.map_range(n, |i| {
            ((i + 1)..n)
                .map(|j| metric.between(bags[i], bags[j]))
                .collect::<Result<Vec<f64>>>()
        });
        let mut data = vec![0.0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, d) in row?.into_iter().enumerate() {
                let j = i + 1 + off;
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Ok(DistanceMatrix { rows: n, cols: n, data })
    }

    /// `|queries| × |refs|` table.
    pub fn cross(queries: &[&Bag], refs: &[&Bag], metric: BagDistance, exec: Execution) -> Result<Self> {
        let rows = exec.map_range(queries.len(), |i| {
            refs.iter()
                .map(|r| metric.between(queries[i], r))
                .collect::<Result<Vec<f64>>>()
        });
        let mut data = Vec::with_capacity(queries.len() * refs.len());
        for row in rows {
            data.extend(row?);
        }
        Ok(DistanceMatrix {
            rows: queries.len(),
            cols: refs.len(),
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Sub-table over the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> DistanceMatrix {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            data.extend(cols.iter().map(|&j| self.get(i, j)));
        }
        DistanceMatrix {
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }
}

fn check_uniform(bags: &[&Bag]) -> Result<()> {
    if let Some(first) = bags.first() {
        let dim = first.dim();
        if let Some(b) = bags.iter().find(|b| b.dim() != dim) {
            return Err(MimlError::DimensionMismatch {
                expected: dim,
                found: b.dim(),
            });
        }
    }
    Ok(())
}
