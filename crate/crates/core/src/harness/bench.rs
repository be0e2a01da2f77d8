use std::time::Instant;

use crate::bag::{LabelSet, MimlDataset};
use crate::error::{MimlError, Result};
use crate::exec::Execution;
use crate::learners::{predict_many, train, Algorithm, AlgorithmParams};
use crate::metrics::{evaluate_all, EvalReport};

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Ok(EvalReport),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub params: AlgorithmParams,
    pub seed: u64,
    pub outcome: RowOutcome,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, a: Algorithm) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.algorithm == a)
    }
}

/// Trains on `train` and evaluates on `test` for the given train/predict round.
pub fn evaluate_model(
    train_set: &MimlDataset,
    test_set: &MimlDataset,
    params: &AlgorithmParams,
    seed: u64,
    exec: Execution,
) -> Result<EvalReport> {
    let model = train(train_set, params, seed)?;
    let preds = predict_many(&model, &test_set.bags(), exec)?;
    let (scores, decided): (Vec<Vec<f64>>, Vec<LabelSet>) = preds.into_iter().map(|p| (p.scores, p.decided)).unzip();
    let truth: Vec<LabelSet> = test_set.cases.iter().map(|c| c.labels.clone()).collect();
    evaluate_all(&scores, &decided, &truth, test_set.n_labels())
}

/// Runs each selected algorithm; rows follow the fixed table order whatever
/// `exec` does. A failing algorithm becomes a failed row.
pub fn run_benchmark(
    train_set: &MimlDataset,
    test_set: &MimlDataset,
    selection: &[AlgorithmParams],
    seed: u64,
    exec: Execution,
) -> Result<BenchReport> {
    if train_set.manifest.dim != test_set.manifest.dim || train_set.manifest.label_names != test_set.manifest.label_names {
        return Err(MimlError::invalid("train and test manifests disagree on dim or labels"));
    }
    if train_set.is_empty() {
        return Err(MimlError::invalid("training set is empty"));
    }
    let mut selection = selection.to_vec();
    selection.sort_by_key(|p| Algorithm::ALL.iter().position(|&a| a == p.algorithm()));
    let rows = exec.map_slice(&selection, |p| {
        let start = Instant::now();
        let outcome = match evaluate_model(train_set, test_set, p, seed, Execution::Sequential) {
            Ok(r) => RowOutcome::Ok(r),
            Err(e) => RowOutcome::Failed(e.to_string()),
        };
        BenchRow {
            algorithm: p.algorithm(),
            params: p.clone(),
            seed,
            outcome,
            seconds: start.elapsed().as_secs_f64(),
        }
    });
    Ok(BenchReport { rows })
}
