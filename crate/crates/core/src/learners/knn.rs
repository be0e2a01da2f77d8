//! MIML-kNN: label counts over a bag's nearest neighbours and its citers,
//! mapped to scores by a least-squares linear layer.

use serde::{Deserialize, Serialize};

use super::params::MimlKnnParams;
use super::{check_training_set, sign_targets, AlgorithmParams, Payload, TrainedModel};
use crate::bag::{Bag, LabelSet, MimlDataset};
use crate::baselearn::{ridge_solve, LinearMap, PLAIN_LEAST_SQUARES_LAMBDA};
use crate::distance::{BagDistance, DistanceMatrix};
use crate::error::{MimlError, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimlKnnModel {
    pub r: usize,
    pub distance: BagDistance,
    pub bags: Vec<Bag>,
    pub labels: Vec<LabelSet>,
    /// Distance from each training bag to its `c`-th nearest other training bag.
    /// A query closer than this counts the training bag as a citer.
    pub citer_radius: Vec<f64>,
    /// `L × L` map from citation counts to scores.
    pub map: LinearMap,
}

/// Indices sorted by `(distance, index)`.
fn ranked(dists: &[f64], skip: Option<usize>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..dists.len()).filter(|&j| Some(j) != skip).collect();
    idx.sort_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(a.cmp(&b)));
    idx
}

fn citation_vector(members: impl Iterator<Item = usize>, labels: &[LabelSet], n_labels: usize) -> Vec<f64> {
    let mut z = vec![0.0; n_labels];
    for k in members {
        for l in labels[k].iter() {
            z[l] += 1.0;
        }
    }
    z
}

pub fn train_miml_knn(d: &MimlDataset, p: &MimlKnnParams, seed: u64) -> Result<TrainedModel> {
    p.validate()?;
    check_training_set(d, 2)?;
    let n = d.len();
    if p.r >= n {
        return Err(MimlError::invalid(format!("MIML-kNN needs r < |cases| (r={}, |cases|={n})", p.r)));
    }
    let n_labels = d.n_labels();
    let mut warnings = Vec::new();
    for (l, &count) in d.label_counts().iter().enumerate() {
        if count == 0 {
            warnings.push(format!("label {l} has no positive training case"));
        }
    }
    let c = p.c.min(n - 1);
    if c < p.c {
        warnings.push(format!("c clamped from {} to {c}", p.c));
    }

    let exec = Execution::default();
    let bags = d.bags();
    let dm = DistanceMatrix::pairwise(&bags, p.distance, exec)?;
    let orders: Vec<Vec<usize>> = exec.map_range(n, |i| ranked(dm.row(i), Some(i)));
    let citer_radius: Vec<f64> = (0..n).map(|j| dm.get(j, orders[j][c - 1])).collect();

    let mut member = vec![vec![false; n]; n];
    for i in 0..n {
        for &k in &orders[i][..p.r] {
            member[i][k] = true;
        }
    }
    for j in 0..n {
        for &i in &orders[j][..c] {
            member[i][j] = true;
        }
    }

    let labels: Vec<LabelSet> = d.cases.iter().map(|c| c.labels.clone()).collect();
    let design: Vec<Vec<f64>> = (0..n)
        .map(|i| citation_vector((0..n).filter(|&k| member[i][k]), &labels, n_labels))
        .collect();
    let targets: Vec<Vec<f64>> = labels.iter().map(|y| sign_targets(y, n_labels)).collect();
    let map = ridge_solve(&design, &targets, PLAIN_LEAST_SQUARES_LAMBDA)?;

    let model = MimlKnnModel {
        r: p.r,
        distance: p.distance,
        bags: d.cases.iter().map(|c| c.bag.clone()).collect(),
        labels,
        citer_radius,
        map,
    };
    Ok(TrainedModel::new(
        d,
        AlgorithmParams::MimlKnn(p.clone()),
        seed,
        Payload::MimlKnn(model),
        warnings,
    ))
}

impl MimlKnnModel {
    pub(crate) fn scores(&self, bag: &Bag) -> Vec<f64> {
        let dists: Vec<f64> = self
            .bags
            .iter()
            .map(|b| self.distance.between(bag, b).expect("dimension checked by predict"))
            .collect();
        let order = ranked(&dists, None);
        let mut member = vec![false; self.bags.len()];
        for &k in &order[..self.r.min(order.len())] {
            member[k] = true;
        }
        for (j, (&dj, &radius)) in dists.iter().zip(&self.citer_radius).enumerate() {
            if dj <= radius {
                member[j] = true;
            }
        }
        let n_labels = self.map.out_dim();
        let z = citation_vector((0..member.len()).filter(|&k| member[k]), &self.labels, n_labels);
        self.map.apply(&z).expect("citation vector has L entries")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bag::{Case, Manifest};
    use crate::learners::predict;

    fn one_label_dataset(n: usize) -> MimlDataset {
        let cases = (0..n)
            .map(|i| Case {
                case_id: format!("c{i}"),
                expert_id: "e".into(),
                labels: LabelSet::new(vec![0]),
                bag: Bag::from_rows(vec![vec![i as f64, 0.5], vec![0.0, i as f64 * 0.3]]).unwrap(),
            })
            .collect();
        MimlDataset::new(Manifest::new(2, vec!["a".into(), "b".into(), "c".into()]), cases)
    }

    #[test]
    fn r_must_be_below_case_count() {
        let d = one_label_dataset(5);
        let err = train_miml_knn(&d, &MimlKnnParams::default(), 0).unwrap_err();
        assert!(matches!(err, MimlError::InvalidArgument(_)));
    }

    #[test]
    fn single_label_everywhere_decides_that_label() {
        let d = one_label_dataset(8);
        let p = MimlKnnParams { r: 3, c: 3, ..Default::default() };
        let m = train_miml_knn(&d, &p, 0).unwrap();
        for c in &d.cases {
            assert_eq!(predict(&m, &c.bag).unwrap().decided.as_slice(), &[0]);
        }
        let probe = Bag::from_rows(vec![vec![100.0, -4.0]]).unwrap();
        assert_eq!(predict(&m, &probe).unwrap().decided.as_slice(), &[0]);
    }
}
