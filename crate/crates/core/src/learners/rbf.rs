//! MIMLRBF: a two-layer RBF network whose hidden units are k-medoids bags of
//! each label and whose output layer is fit by least squares.

use serde::{Deserialize, Serialize};

use super::params::MimlRbfParams;
use super::{check_training_set, sign_targets, sub_seed, AlgorithmParams, Payload, TrainedModel};
use crate::bag::{Bag, MimlDataset};
use crate::baselearn::{k_medoids, ridge_solve, LinearMap, PLAIN_LEAST_SQUARES_LAMBDA};
use crate::distance::{BagDistance, DistanceMatrix};
use crate::error::Result;
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimlRbfModel {
    pub distance: BagDistance,
    pub medoids: Vec<Bag>,
    /// Label whose positive bags produced each medoid.
    pub medoid_labels: Vec<usize>,
    pub sigma: f64,
    /// `L × H` output weights plus per-label bias.
    pub output: LinearMap,
}

/// `max(1, round(alpha · n_l))`, never more than `n_l`.
pub fn medoids_per_label(alpha: f64, n_positive: usize) -> usize {
    ((alpha * n_positive as f64).round() as usize).max(1).min(n_positive.max(1))
}

fn activation(dist: f64, sigma: f64) -> f64 {
    (-(dist * dist) / (2.0 * sigma * sigma)).exp()
}

pub fn train_miml_rbf(d: &MimlDataset, p: &MimlRbfParams, seed: u64) -> Result<TrainedModel> {
    p.validate()?;
    check_training_set(d, 1)?;
    let n = d.len();
    let n_labels = d.n_labels();
    let exec = Execution::default();
    let bags = d.bags();
    let dm = DistanceMatrix::pairwise(&bags, p.distance, exec)?;

    let mut warnings = Vec::new();
    let mut skipped = vec![false; n_labels];
    let mut centers: Vec<usize> = Vec::new();
    let mut medoid_labels = Vec::new();
    for (l, skip) in skipped.iter_mut().enumerate() {
        let positives: Vec<usize> = (0..n).filter(|&i| d.cases[i].labels.contains(l)).collect();
        if positives.is_empty() {
            warnings.push(format!("label {l} has no positive training case; scored as constant -1"));
            *skip = true;
            continue;
        }
        let k = medoids_per_label(p.alpha, positives.len());
        let sub = dm.select(&positives, &positives);
        let med = k_medoids(positives.len(), k, |i, j| sub.get(i, j), sub_seed(seed, l as u64))?;
        for m in med.medoids {
            centers.push(positives[m]);
            medoid_labels.push(l);
        }
    }

    let h = centers.len();
    let mut pair_sum = 0.0;
    let mut pairs = 0usize;
    for a in 0..h {
        for b in (a + 1)..h {
            pair_sum += dm.get(centers[a], centers[b]);
            pairs += 1;
        }
    }
    let mut spread = if pairs > 0 { pair_sum / pairs as f64 } else { 0.0 };
    if !(spread > 0.0) && h > 0 {
        // Single (or coincident) medoids: fall back to the mean bag-to-medoid distance.
        let total: f64 = (0..n).flat_map(|i| centers.iter().map(move |&c| (i, c))).map(|(i, c)| dm.get(i, c)).sum();
        spread = total / (n * h) as f64;
        warnings.push("fewer than two distinct medoids; sigma taken from mean bag-to-medoid distance".into());
    }
    if !(spread > 0.0) {
        spread = 1.0;
    }
    let sigma = p.mu * spread;

    let design: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = centers.iter().map(|&c| activation(dm.get(i, c), sigma)).collect();
            row.push(1.0);
            row
        })
        .collect();
    let targets: Vec<Vec<f64>> = d.cases.iter().map(|c| sign_targets(&c.labels, n_labels)).collect();
    let fit = ridge_solve(&design, &targets, PLAIN_LEAST_SQUARES_LAMBDA)?;

    let mut weights = Vec::with_capacity(n_labels);
    let mut bias = Vec::with_capacity(n_labels);
    for (l, row) in fit.weights.into_iter().enumerate() {
        if skipped[l] {
            weights.push(vec![0.0; h]);
            bias.push(-1.0);
        } else {
            bias.push(row[h]);
            weights.push(row[..h].to_vec());
        }
    }
    let model = MimlRbfModel {
        distance: p.distance,
        medoids: centers.iter().map(|&c| d.cases[c].bag.clone()).collect(),
        medoid_labels,
        sigma,
        output: LinearMap { weights, bias },
    };
    Ok(TrainedModel::new(
        d,
        AlgorithmParams::MimlRbf(p.clone()),
        seed,
        Payload::MimlRbf(model),
        warnings,
    ))
}

impl MimlRbfModel {
    pub fn hidden_units(&self) -> usize {
        self.medoids.len()
    }

    pub(crate) fn scores(&self, bag: &Bag) -> Vec<f64> {
        let phi: Vec<f64> = self
            .medoids
            .iter()
            .map(|m| activation(self.distance.between(bag, m).expect("dimension checked by predict"), self.sigma))
            .collect();
        self.output.apply(&phi).expect("one activation per hidden unit")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn medoid_count_rule() {
        assert_eq!(medoids_per_label(0.1, 40), 4);
        assert_eq!(5 * medoids_per_label(0.1, 40), 20);
        assert_eq!(medoids_per_label(0.1, 3), 1);
        assert_eq!(medoids_per_label(0.01, 10), 1);
        assert_eq!(medoids_per_label(1.0, 7), 7);
    }
}
