//! MIMLBOOST: every (bag, label) pair becomes a multi-instance single-label
//! bag whose instances carry a one-hot label tag; a multi-instance boosting
//! loop with an RBF SVM base learner is run over those bags.

use serde::{Deserialize, Serialize};

use super::params::MimlBoostParams;
use super::{check_training_set, sub_seed, AlgorithmParams, Payload, TrainedModel};
use crate::bag::{Bag, MimlDataset};
use crate::baselearn::svm::train_on_gram;
use crate::baselearn::{Gram, SvmModel, SVM_TOL};
use crate::distance::squared_euclidean_unchecked;
use crate::error::Result;
use crate::exec::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostRound {
    pub coef: f64,
    pub svm: SvmModel,
    /// Label tag of each support vector.
    pub sv_tags: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimlBoostModel {
    pub dim: usize,
    pub n_labels: usize,
    pub rounds: Vec<BoostRound>,
    /// When set, the ensemble is replaced by the constant `prior` scores.
    pub degenerate: bool,
    pub prior: Vec<f64>,
}

/// One multi-instance single-label bag derived from a MIML case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelBag {
    pub case: usize,
    pub label: usize,
    pub target: f64,
}

/// `[X_i, l]` for every case `i` and label `l`, with target `+1` iff `l ∈ Y_i`.
pub fn expand_to_label_bags(d: &MimlDataset) -> Vec<LabelBag> {
    let n_labels = d.n_labels();
    (0..n_labels)
        .flat_map(|l| {
            d.cases.iter().enumerate().map(move |(i, c)| LabelBag {
                case: i,
                label: l,
                target: if c.labels.contains(l) { 1.0 } else { -1.0 },
            })
        })
        .collect()
}

fn tagged(x: &[f64], label: usize, n_labels: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(x.len() + n_labels);
    v.extend_from_slice(x);
    v.extend((0..n_labels).map(|m| if m == label { 1.0 } else { 0.0 }));
    v
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Clamp for a perfect round so its coefficient stays finite.
const MIN_ERROR: f64 = 1e-10;

pub fn train_miml_boost(d: &MimlDataset, p: &MimlBoostParams, seed: u64) -> Result<TrainedModel> {
    p.validate()?;
    check_training_set(d, 2)?;
    let n_labels = d.n_labels();
    let dim = d.dim();
    let exec = Execution::default();

    let label_bags = expand_to_label_bags(d);
    let mut instances = Vec::new();
    let mut spans = Vec::with_capacity(label_bags.len());
    for lb in &label_bags {
        let start = instances.len();
        for x in d.cases[lb.case].bag.iter() {
            instances.push(tagged(x, lb.label, n_labels));
        }
        spans.push(start..instances.len());
    }
    let n_inst = instances.len();
    let ys: Vec<f64> = label_bags
        .iter()
        .zip(&spans)
        .flat_map(|(lb, s)| std::iter::repeat_n(lb.target, s.len()))
        .collect();
    let gram = Gram::new(&instances, p.kernel, exec)?;

    let n_pairs = label_bags.len();
    let mut weights = vec![1.0 / n_pairs as f64; n_pairs];
    let mut rounds = Vec::new();
    let mut warnings = Vec::new();
    let mut degenerate = false;

    for t in 0..p.rounds {
        let mut upper = vec![0.0; n_inst];
        for (w, s) in weights.iter().zip(&spans) {
            let per = p.base_cost * w * n_inst as f64 / s.len() as f64;
            upper[s.clone()].iter_mut().for_each(|u| *u = per.max(1e-12));
        }
        let (svm, decision) = train_on_gram(&gram, &ys, &upper, p.base_cost, SVM_TOL, sub_seed(seed, t as u64))?;
        let errors: Vec<f64> = label_bags
            .iter()
            .zip(&spans)
            .map(|(lb, s)| {
                let score = decision[s.clone()].iter().map(|&v| sign(v)).sum::<f64>() / s.len() as f64;
                if lb.target * score <= 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let eps: f64 = weights.iter().zip(&errors).map(|(w, e)| w * e).sum();
        if eps >= 0.5 {
            if t == 0 {
                degenerate = true;
                warnings.push(format!("weighted error {eps:.3} >= 0.5 in the first round; constant scorer"));
            } else {
                warnings.push(format!("stopped after {t} rounds: weighted error {eps:.3} >= 0.5"));
            }
            break;
        }
        let clamped = eps.max(MIN_ERROR);
        let coef = 0.5 * ((1.0 - clamped) / clamped).ln();
        let sv_tags = svm
            .support_vectors
            .iter()
            .map(|sv| (0..n_labels).find(|&m| sv[dim + m] == 1.0).unwrap_or(0))
            .collect();
        rounds.push(BoostRound { coef, svm, sv_tags });
        if eps == 0.0 {
            break;
        }
        for (w, e) in weights.iter_mut().zip(&errors) {
            *w *= (coef * (2.0 * e - 1.0)).exp();
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
    }

    let counts = d.label_counts();
    let prior = counts
        .iter()
        .map(|&c| 2.0 * c as f64 / d.len() as f64 - 1.0)
        .collect();
    let model = MimlBoostModel {
        dim,
        n_labels,
        rounds,
        degenerate,
        prior,
    };
    Ok(TrainedModel::new(
        d,
        AlgorithmParams::MimlBoost(p.clone()),
        seed,
        Payload::MimlBoost(model),
        warnings,
    ))
}

impl MimlBoostModel {
    /// Base-SVM margins of `x` under every label tag at once, using
    /// `‖x⊕e_l − s⊕e_m‖² = ‖x − s‖² + 2·[l ≠ m]`.
    fn tagged_margins(&self, round: &BoostRound, x: &[f64]) -> Vec<f64> {
        let svm = &round.svm;
        let gamma = svm.kernel.gamma;
        let mut per_tag = vec![0.0; self.n_labels];
        for ((sv, c), &tag) in svm.support_vectors.iter().zip(&svm.dual_coef).zip(&round.sv_tags) {
            per_tag[tag] += c * (-gamma * squared_euclidean_unchecked(x, &sv[..self.dim])).exp();
        }
        let total: f64 = per_tag.iter().sum();
        let off = (-2.0 * gamma).exp();
        per_tag
            .iter()
            .map(|&own| own + off * (total - own) + svm.bias)
            .collect()
    }

    pub(crate) fn scores(&self, bag: &Bag) -> Vec<f64> {
        if self.degenerate {
            return self.prior.clone();
        }
        let mut scores = vec![0.0; self.n_labels];
        for round in &self.rounds {
            let mut votes = vec![0.0; self.n_labels];
            for x in bag.iter() {
                if round.svm.degenerate {
                    votes.iter_mut().for_each(|v| *v += sign(round.svm.bias));
                } else {
                    for (v, m) in votes.iter_mut().zip(self.tagged_margins(round, x)) {
                        *v += sign(m);
                    }
                }
            }
            for (s, v) in scores.iter_mut().zip(votes) {
                *s += round.coef * v / bag.len() as f64;
            }
        }
        scores
    }

    pub fn ensemble_size(&self) -> usize {
        self.rounds.len()
    }
}
