//! M3MIML: one linear model per label, a bag scored by its best instance,
//! trained on the hinge-loss maximum-margin objective
//! `Σ_l ‖w_l‖²/2 + C Σ_i Σ_l max(0, 1 − s_il · max_x (w_l·x + b_l))`.

use serde::{Deserialize, Serialize};

use super::params::M3MimlParams;
use super::{check_training_set, AlgorithmParams, Payload, TrainedModel};
use crate::bag::{Bag, MimlDataset};
use crate::error::Result;

const CHECKPOINT_EVERY: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct M3MimlModel {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    /// Labels with only positive or only negative training cases; their score is the constant bias.
    pub constant: Vec<bool>,
    /// Best objective reached at every checkpoint, starting with the initial iterate.
    pub objective_trace: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Best instance score and its index.
fn bag_max(w: &[f64], b: f64, bag: &Bag) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (k, x) in bag.iter().enumerate() {
        let s = dot(w, x) + b;
        if s > best.0 {
            best = (s, k);
        }
    }
    best
}

struct Problem<'a> {
    bags: Vec<&'a Bag>,
    signs: Vec<Vec<f64>>,
    active: Vec<usize>,
    cost: f64,
}

impl Problem<'_> {
    fn objective(&self, w: &[Vec<f64>], b: &[f64]) -> f64 {
        let mut obj = 0.0;
        for &l in &self.active {
            obj += 0.5 * dot(&w[l], &w[l]);
            for (bag, s) in self.bags.iter().zip(&self.signs) {
                let (score, _) = bag_max(&w[l], b[l], bag);
                obj += self.cost * (1.0 - s[l] * score).max(0.0);
            }
        }
        obj
    }
}

pub fn train_m3miml(d: &MimlDataset, p: &M3MimlParams, seed: u64) -> Result<TrainedModel> {
    p.validate()?;
    check_training_set(d, 1)?;
    let n = d.len();
    let n_labels = d.n_labels();
    let dim = d.dim();

    let counts = d.label_counts();
    let mut warnings = Vec::new();
    let mut constant = vec![false; n_labels];
    let mut w = vec![vec![0.0; dim]; n_labels];
    let mut b = vec![0.0; n_labels];
    for l in 0..n_labels {
        if counts[l] == 0 || counts[l] == n {
            constant[l] = true;
            b[l] = if counts[l] == 0 { -1.0 } else { 1.0 };
            warnings.push(format!("label {l} is single-class in training; constant score"));
        }
    }
    let problem = Problem {
        bags: d.bags(),
        signs: d
            .cases
            .iter()
            .map(|c| (0..n_labels).map(|l| if c.labels.contains(l) { 1.0 } else { -1.0 }).collect())
            .collect(),
        active: (0..n_labels).filter(|&l| !constant[l]).collect(),
        cost: p.cost,
    };

    // Descent on the objective scaled by 1/(C·n): same minimizer, step size independent of n.
    let scale = 1.0 / (p.cost * n as f64);
    let mut best_obj = problem.objective(&w, &b);
    let mut best = (w.clone(), b.clone());
    let mut trace = vec![best_obj];
    for it in 0..p.max_iters {
        for &l in &problem.active {
            let mut gw = w[l].clone();
            let mut gb = 0.0;
            for (bag, s) in problem.bags.iter().zip(&problem.signs) {
                let (score, k) = bag_max(&w[l], b[l], bag);
                if s[l] * score < 1.0 {
                    for (g, x) in gw.iter_mut().zip(bag[k].iter()) {
                        *g -= p.cost * s[l] * x;
                    }
                    gb -= p.cost * s[l];
                }
            }
            for (wi, g) in w[l].iter_mut().zip(&gw) {
                *wi -= p.step * scale * g;
            }
            b[l] -= p.step * scale * gb;
        }
        let obj = problem.objective(&w, &b);
        if obj < best_obj {
            best_obj = obj;
            best = (w.clone(), b.clone());
        }
        if (it + 1) % CHECKPOINT_EVERY == 0 || it + 1 == p.max_iters {
            trace.push(best_obj);
        }
    }
    let _ = seed;

    let model = M3MimlModel {
        weights: best.0,
        bias: best.1,
        constant,
        objective_trace: trace,
    };
    Ok(TrainedModel::new(
        d,
        AlgorithmParams::M3Miml(p.clone()),
        seed,
        Payload::M3Miml(model),
        warnings,
    ))
}

impl M3MimlModel {
    pub(crate) fn scores(&self, bag: &Bag) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .zip(&self.constant)
            .map(|((w, &b), &c)| if c { b } else { bag_max(w, b, bag).0 })
            .collect()
    }
}
