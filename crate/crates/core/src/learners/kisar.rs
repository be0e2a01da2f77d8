//! KISAR: bags are mapped onto label-specific instance prototypes by their
//! best-matching instance, and per-label logistic models are trained jointly
//! with a penalty pulling the weights of co-occurring labels together.

use serde::{Deserialize, Serialize};

use super::params::KisarParams;
use super::{check_training_set, sub_seed, AlgorithmParams, Payload, TrainedModel};
use crate::bag::{Bag, LabelSet, MimlDataset};
use crate::baselearn::k_means;
use crate::distance::squared_euclidean_unchecked;
use crate::error::Result;
use crate::exec::Execution;

const CHECKPOINT_EVERY: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KisarModel {
    pub similarity_gamma: f64,
    pub prototypes: Vec<Vec<f64>>,
    /// Label whose positive bags produced each prototype.
    pub prototype_labels: Vec<usize>,
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub constant: Vec<bool>,
    pub objective_trace: Vec<f64>,
}

/// Cosine similarity between the label-indicator columns of `labels`.
pub fn label_correlation(labels: &[LabelSet], n_labels: usize) -> Vec<Vec<f64>> {
    let mut co = vec![vec![0.0f64; n_labels]; n_labels];
    for y in labels {
        for a in y.iter() {
            for b in y.iter() {
                co[a][b] += 1.0;
            }
        }
    }
    let mut out = vec![vec![0.0; n_labels]; n_labels];
    for a in 0..n_labels {
        for b in 0..n_labels {
            let denom = (co[a][a] * co[b][b]).sqrt();
            if denom > 0.0 {
                out[a][b] = co[a][b] / denom;
            }
        }
    }
    out
}

fn embed(prototypes: &[Vec<f64>], gamma: f64, bag: &Bag) -> Vec<f64> {
    prototypes
        .iter()
        .map(|p| {
            bag.iter()
                .map(|x| (-gamma * squared_euclidean_unchecked(x, p)).exp())
                .fold(0.0, f64::max)
        })
        .collect()
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Problem {
    features: Vec<Vec<f64>>,
    signs: Vec<Vec<f64>>,
    corr: Vec<Vec<f64>>,
    active: Vec<usize>,
    weight: f64,
}

impl Problem {
    fn objective(&self, w: &[Vec<f64>], b: &[f64]) -> f64 {
        let mut loss = 0.0;
        for (f, s) in self.features.iter().zip(&self.signs) {
            for &l in &self.active {
                loss += softplus(-s[l] * (dot(&w[l], f) + b[l]));
            }
        }
        let mut reg = 0.0;
        for &l in &self.active {
            for &m in self.active.iter().filter(|&&m| m != l) {
                let diff: f64 = w[l].iter().zip(&w[m]).map(|(a, c)| (a - c) * (a - c)).sum();
                reg += self.corr[l][m] * diff;
            }
        }
        loss + self.weight * reg
    }

    /// Upper bound on the gradient's Lipschitz constant.
    fn smoothness(&self) -> f64 {
        let data = 0.25 * self.features.iter().map(|f| dot(f, f) + 1.0).sum::<f64>();
        let max_degree = self
            .active
            .iter()
            .map(|&l| self.active.iter().filter(|&&m| m != l).map(|&m| self.corr[l][m]).sum::<f64>())
            .fold(0.0, f64::max);
        data + 8.0 * self.weight * max_degree
    }
}

pub fn train_kisar(d: &MimlDataset, p: &KisarParams, seed: u64) -> Result<TrainedModel> {
    p.validate()?;
    check_training_set(d, 1)?;
    let n = d.len();
    let n_labels = d.n_labels();
    let counts = d.label_counts();

    let mut warnings = Vec::new();
    let mut constant = vec![false; n_labels];
    let mut prototypes = Vec::new();
    let mut prototype_labels = Vec::new();
    for l in 0..n_labels {
        if counts[l] == 0 || counts[l] == n {
            constant[l] = true;
            warnings.push(format!("label {l} is single-class in training; constant score"));
        }
        if counts[l] == 0 {
            continue;
        }
        let pooled: Vec<&[f64]> = d
            .cases
            .iter()
            .filter(|c| c.labels.contains(l))
            .flat_map(|c| c.bag.iter().map(|x| x.as_slice()))
            .collect();
        let k = p.prototypes_per_label.min(pooled.len());
        let km = k_means(&pooled, k, sub_seed(seed, l as u64))?;
        for c in km.centroids {
            prototypes.push(c);
            prototype_labels.push(l);
        }
    }

    let gamma = p.similarity_gamma;
    let exec = Execution::default();
    let features = exec.map_slice(&d.cases, |c| embed(&prototypes, gamma, &c.bag));
    let labels: Vec<LabelSet> = d.cases.iter().map(|c| c.labels.clone()).collect();
    let problem = Problem {
        features,
        signs: labels
            .iter()
            .map(|y| (0..n_labels).map(|l| if y.contains(l) { 1.0 } else { -1.0 }).collect())
            .collect(),
        corr: label_correlation(&labels, n_labels),
        active: (0..n_labels).filter(|&l| !constant[l]).collect(),
        weight: p.correlation_weight,
    };

    let dim = prototypes.len();
    let mut w = vec![vec![0.0; dim]; n_labels];
    let mut b: Vec<f64> = (0..n_labels)
        .map(|l| match (constant[l], counts[l]) {
            (true, 0) => -1.0,
            (true, _) => 1.0,
            _ => 0.0,
        })
        .collect();
    let step = 1.0 / problem.smoothness();
    let mut trace = vec![problem.objective(&w, &b)];
    for it in 0..p.max_iters {
        let mut gw = vec![vec![0.0; dim]; n_labels];
        let mut gb = vec![0.0; n_labels];
        for (f, s) in problem.features.iter().zip(&problem.signs) {
            for &l in &problem.active {
                let z = s[l] * (dot(&w[l], f) + b[l]);
                let g = -s[l] * sigmoid(-z);
                for (gi, fi) in gw[l].iter_mut().zip(f) {
                    *gi += g * fi;
                }
                gb[l] += g;
            }
        }
        for &l in &problem.active {
            for &m in problem.active.iter().filter(|&&m| m != l) {
                let c = 4.0 * problem.weight * problem.corr[l][m];
                if c != 0.0 {
                    for k in 0..dim {
                        gw[l][k] += c * (w[l][k] - w[m][k]);
                    }
                }
            }
        }
        for &l in &problem.active {
            for (wi, g) in w[l].iter_mut().zip(&gw[l]) {
                *wi -= step * g;
            }
            b[l] -= step * gb[l];
        }
        if (it + 1) % CHECKPOINT_EVERY == 0 || it + 1 == p.max_iters {
            trace.push(problem.objective(&w, &b));
        }
    }

    let model = KisarModel {
        similarity_gamma: gamma,
        prototypes,
        prototype_labels,
        weights: w,
        bias: b,
        constant,
        objective_trace: trace,
    };
    Ok(TrainedModel::new(
        d,
        AlgorithmParams::Kisar(p.clone()),
        seed,
        Payload::Kisar(model),
        warnings,
    ))
}

impl KisarModel {
    pub fn embed(&self, bag: &Bag) -> Vec<f64> {
        embed(&self.prototypes, self.similarity_gamma, bag)
    }

    pub(crate) fn scores(&self, bag: &Bag) -> Vec<f64> {
        let f = self.embed(bag);
        self.weights
            .iter()
            .zip(&self.bias)
            .zip(&self.constant)
            .map(|((w, &b), &c)| if c { b } else { dot(w, &f) + b })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn co_occurring_labels_have_unit_correlation() {
        let labels = vec![LabelSet::new(vec![0, 2]), LabelSet::new(vec![1]), LabelSet::new(vec![0, 2])];
        let c = label_correlation(&labels, 3);
        assert!((c[0][2] - 1.0).abs() < 1e-15);
        assert_eq!(c[0][1], 0.0);
        assert_eq!(c[1][1], 1.0);
    }

    #[test]
    fn partial_overlap_is_cosine() {
        let labels = vec![LabelSet::new(vec![0, 1]), LabelSet::new(vec![0]), LabelSet::new(vec![1])];
        let c = label_correlation(&labels, 2);
        assert!((c[0][1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn embedding_ignores_duplicates() {
        let protos = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let a = Bag::from_rows(vec![vec![0.1, 0.0], vec![0.9, 1.2]]).unwrap();
        let b = Bag::from_rows(vec![vec![0.9, 1.2], vec![0.1, 0.0], vec![0.1, 0.0]]).unwrap();
        assert_eq!(embed(&protos, 1.0, &a), embed(&protos, 1.0, &b));
    }
}
