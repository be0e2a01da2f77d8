//! MIMLSVM: constructive clustering turns each bag into its vector of
//! distances to k medoid bags; one RBF SVM per label is trained on those.

use serde::{Deserialize, Serialize};

use super::params::MimlSvmParams;
use super::{check_training_set, sub_seed, AlgorithmParams, Payload, TrainedModel};
use crate::bag::{Bag, MimlDataset};
use crate::baselearn::svm::train_on_gram;
use crate::baselearn::{k_medoids, Gram, SvmModel, SVM_TOL};
use crate::distance::{BagDistance, DistanceMatrix};
use crate::error::Result;
use crate::exec::Execution;

/// A bag mapped to a single instance: its distances to the model's medoids.
#[derive(Debug, Clone, PartialEq)]
pub struct BagEmbedding {
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimlSvmModel {
    pub distance: BagDistance,
    pub medoids: Vec<Bag>,
    pub svms: Vec<SvmModel>,
}

/// `max(1, round(ratio · n))`, capped at `n`.
pub fn embedding_dim(ratio: f64, n_cases: usize) -> usize {
    ((ratio * n_cases as f64).round() as usize).max(1).min(n_cases)
}

pub fn train_miml_svm(d: &MimlDataset, p: &MimlSvmParams, seed: u64) -> Result<TrainedModel> {
    p.validate()?;
    check_training_set(d, 2)?;
    let n = d.len();
    let n_labels = d.n_labels();
    let exec = Execution::default();
    let bags = d.bags();
    let dm = DistanceMatrix::pairwise(&bags, p.distance, exec)?;

    let k = embedding_dim(p.ratio, n);
    let med = k_medoids(n, k, |i, j| dm.get(i, j), sub_seed(seed, 0))?;
    let embeddings: Vec<Vec<f64>> = (0..n)
        .map(|i| med.medoids.iter().map(|&m| dm.get(i, m)).collect())
        .collect();

    let gram = Gram::new(&embeddings, p.kernel, exec)?;
    let upper = vec![p.cost; n];
    let mut warnings = Vec::new();
    let mut svms = Vec::with_capacity(n_labels);
    for l in 0..n_labels {
        let ys: Vec<f64> = d
            .cases
            .iter()
            .map(|c| if c.labels.contains(l) { 1.0 } else { -1.0 })
            .collect();
        let (model, _) = train_on_gram(&gram, &ys, &upper, p.cost, SVM_TOL, sub_seed(seed, 1 + l as u64))?;
        if model.degenerate {
            warnings.push(format!("label {l} is single-class in training; constant score"));
        }
        svms.push(model);
    }
    let model = MimlSvmModel {
        distance: p.distance,
        medoids: med.medoids.iter().map(|&m| d.cases[m].bag.clone()).collect(),
        svms,
    };
    Ok(TrainedModel::new(
        d,
        AlgorithmParams::MimlSvm(p.clone()),
        seed,
        Payload::MimlSvm(model),
        warnings,
    ))
}

impl MimlSvmModel {
    pub fn embed(&self, bag: &Bag) -> BagEmbedding {
        BagEmbedding {
            vector: self
                .medoids
                .iter()
                .map(|m| self.distance.between(bag, m).expect("dimension checked by predict"))
                .collect(),
        }
    }

    pub(crate) fn scores(&self, bag: &Bag) -> Vec<f64> {
        let z = self.embed(bag);
        self.svms.iter().map(|s| s.margin_unchecked(&z.vector)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_dim_rule() {
        assert_eq!(embedding_dim(0.2, 173), 35);
        assert_eq!(embedding_dim(0.01, 20), 1);
        assert_eq!(embedding_dim(1.0, 12), 12);
        assert_eq!(embedding_dim(0.5, 12), 6);
    }
}
