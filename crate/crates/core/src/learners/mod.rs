//! The six MIML learners behind one train / predict contract.
//!
//! Every learner maps a bag to a real score per label. The decided label set
//! is `{l : score_l > 0}`, or the single top-scoring label (lowest index on
//! ties) when no score is positive.

mod boost;
mod kisar;
mod knn;
mod m3miml;
mod params;
mod rbf;
mod svm;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bag::{Bag, LabelSet, MimlDataset};
use crate::error::{MimlError, Result};
use crate::exec::Execution;

pub use boost::{train_miml_boost, MimlBoostModel};
pub use kisar::{label_correlation, train_kisar, KisarModel};
pub use knn::{train_miml_knn, MimlKnnModel};
pub use m3miml::{train_m3miml, M3MimlModel};
pub use params::{KisarParams, M3MimlParams, MimlBoostParams, MimlKnnParams, MimlRbfParams, MimlSvmParams};
pub use rbf::{medoids_per_label, train_miml_rbf, MimlRbfModel};
pub use svm::{embedding_dim, train_miml_svm, BagEmbedding, MimlSvmModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    MimlKnn,
    M3Miml,
    MimlRbf,
    MimlBoost,
    MimlSvm,
    Kisar,
}

impl Algorithm {
    /// Report row order.
    pub const ALL: [Algorithm; 6] = [
        Algorithm::MimlKnn,
        Algorithm::M3Miml,
        Algorithm::MimlRbf,
        Algorithm::MimlBoost,
        Algorithm::MimlSvm,
        Algorithm::Kisar,
    ];

    /// Name used on the command line and in model files.
    pub fn key(self) -> &'static str {
        match self {
            Algorithm::MimlKnn => "mimlknn",
            Algorithm::M3Miml => "m3miml",
            Algorithm::MimlRbf => "mimlrbf",
            Algorithm::MimlBoost => "mimlboost",
            Algorithm::MimlSvm => "mimlsvm",
            Algorithm::Kisar => "kisar",
        }
    }

    /// Name used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Algorithm::MimlKnn => "MIML-kNN",
            Algorithm::M3Miml => "M3MIML",
            Algorithm::MimlRbf => "MIMLRBF",
            Algorithm::MimlBoost => "MIMLBOOST",
            Algorithm::MimlSvm => "MIMLSVM",
            Algorithm::Kisar => "KISAR",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let k = s.to_ascii_lowercase().replace(['-', '_'], "");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.key() == k)
            .ok_or_else(|| MimlError::invalid(format!("unknown algorithm `{s}`")))
    }

    pub fn default_params(self) -> AlgorithmParams {
        match self {
            Algorithm::MimlKnn => AlgorithmParams::MimlKnn(Default::default()),
            Algorithm::M3Miml => AlgorithmParams::M3Miml(Default::default()),
            Algorithm::MimlRbf => AlgorithmParams::MimlRbf(Default::default()),
            Algorithm::MimlBoost => AlgorithmParams::MimlBoost(Default::default()),
            Algorithm::MimlSvm => AlgorithmParams::MimlSvm(Default::default()),
            Algorithm::Kisar => AlgorithmParams::Kisar(Default::default()),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmParams {
    MimlKnn(MimlKnnParams),
    M3Miml(M3MimlParams),
    MimlRbf(MimlRbfParams),
    MimlBoost(MimlBoostParams),
    MimlSvm(MimlSvmParams),
    Kisar(KisarParams),
}

impl AlgorithmParams {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmParams::MimlKnn(_) => Algorithm::MimlKnn,
            AlgorithmParams::M3Miml(_) => Algorithm::M3Miml,
            AlgorithmParams::MimlRbf(_) => Algorithm::MimlRbf,
            AlgorithmParams::MimlBoost(_) => Algorithm::MimlBoost,
            AlgorithmParams::MimlSvm(_) => Algorithm::MimlSvm,
            AlgorithmParams::Kisar(_) => Algorithm::Kisar,
        }
    }

    /// Applies a `key=value` override, e.g. `r=5` or `distance=max`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self {
            AlgorithmParams::MimlKnn(p) => p.set(key, value),
            AlgorithmParams::M3Miml(p) => p.set(key, value),
            AlgorithmParams::MimlRbf(p) => p.set(key, value),
            AlgorithmParams::MimlBoost(p) => p.set(key, value),
            AlgorithmParams::MimlSvm(p) => p.set(key, value),
            AlgorithmParams::Kisar(p) => p.set(key, value),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            AlgorithmParams::MimlKnn(p) => p.validate(),
            AlgorithmParams::M3Miml(p) => p.validate(),
            AlgorithmParams::MimlRbf(p) => p.validate(),
            AlgorithmParams::MimlBoost(p) => p.validate(),
            AlgorithmParams::MimlSvm(p) => p.validate(),
            AlgorithmParams::Kisar(p) => p.validate(),
        }
    }
}

/// Algorithm-specific learned state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Payload {
    MimlKnn(MimlKnnModel),
    M3Miml(M3MimlModel),
    MimlRbf(MimlRbfModel),
    MimlBoost(MimlBoostModel),
    MimlSvm(MimlSvmModel),
    Kisar(KisarModel),
}

impl Payload {
    fn scores(&self, bag: &Bag) -> Vec<f64> {
        match self {
            Payload::MimlKnn(m) => m.scores(bag),
            Payload::M3Miml(m) => m.scores(bag),
            Payload::MimlRbf(m) => m.scores(bag),
            Payload::MimlBoost(m) => m.scores(bag),
            Payload::MimlSvm(m) => m.scores(bag),
            Payload::Kisar(m) => m.scores(bag),
        }
    }

    fn algorithm(&self) -> Algorithm {
        match self {
            Payload::MimlKnn(_) => Algorithm::MimlKnn,
            Payload::M3Miml(_) => Algorithm::M3Miml,
            Payload::MimlRbf(_) => Algorithm::MimlRbf,
            Payload::MimlBoost(_) => Algorithm::MimlBoost,
            Payload::MimlSvm(_) => Algorithm::MimlSvm,
            Payload::Kisar(_) => Algorithm::Kisar,
        }
    }
}

/// A persistable predictor. Serialized as one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub algorithm: Algorithm,
    pub params: AlgorithmParams,
    pub seed: u64,
    pub label_names: Vec<String>,
    pub dim: usize,
    /// Non-fatal training notes (skipped or constant labels, early stops).
    #[serde(default)]
    pub warnings: Vec<String>,
    pub payload: Payload,
}

impl TrainedModel {
    pub const FORMAT_VERSION: u32 = 1;

    fn new(d: &MimlDataset, params: AlgorithmParams, seed: u64, payload: Payload, warnings: Vec<String>) -> Self {
        TrainedModel {
            format_version: Self::FORMAT_VERSION,
            algorithm: payload.algorithm(),
            params,
            seed,
            label_names: d.manifest.label_names.clone(),
            dim: d.dim(),
            warnings,
            payload,
        }
    }

    pub fn n_labels(&self) -> usize {
        self.label_names.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: TrainedModel = serde_json::from_str(s)?;
        if m.format_version != Self::FORMAT_VERSION {
            return Err(MimlError::invalid(format!(
                "unsupported model format_version {}",
                m.format_version
            )));
        }
        if m.algorithm != m.payload.algorithm() || m.algorithm != m.params.algorithm() {
            return Err(MimlError::invalid("model algorithm tag disagrees with its payload"));
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut s = self.to_json()?;
        s.push('\n');
        std::fs::write(path, s).map_err(|e| MimlError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| MimlError::io(path, e))?;
        Self::from_json(&s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub scores: Vec<f64>,
    pub decided: LabelSet,
}

/// Positive-score labels, or the top label when none is positive.
pub fn decide(scores: &[f64]) -> LabelSet {
    let positive: LabelSet = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > 0.0)
        .map(|(l, _)| l)
        .collect();
    if !positive.is_empty() || scores.is_empty() {
        return positive;
    }
    let mut top = 0;
    for (l, &s) in scores.iter().enumerate() {
        if s > scores[top] {
            top = l;
        }
    }
    LabelSet::new(vec![top])
}

pub fn predict(m: &TrainedModel, bag: &Bag) -> Result<Prediction> {
    if bag.dim() != m.dim {
        return Err(MimlError::DimensionMismatch {
            expected: m.dim,
            found: bag.dim(),
        });
    }
    let scores = m.payload.scores(bag);
    debug_assert_eq!(scores.len(), m.n_labels());
    let decided = decide(&scores);
    Ok(Prediction { scores, decided })
}

/// Predicts every bag, in order.
pub fn predict_many(m: &TrainedModel, bags: &[&Bag], exec: Execution) -> Result<Vec<Prediction>> {
    exec.map_slice(bags, |b| predict(m, b)).into_iter().collect()
}

/// Trains the algorithm named by `params`.
pub fn train(d: &MimlDataset, params: &AlgorithmParams, seed: u64) -> Result<TrainedModel> {
    match params {
        AlgorithmParams::MimlKnn(p) => train_miml_knn(d, p, seed),
        AlgorithmParams::M3Miml(p) => train_m3miml(d, p, seed),
        AlgorithmParams::MimlRbf(p) => train_miml_rbf(d, p, seed),
        AlgorithmParams::MimlBoost(p) => train_miml_boost(d, p, seed),
        AlgorithmParams::MimlSvm(p) => train_miml_svm(d, p, seed),
        AlgorithmParams::Kisar(p) => train_kisar(d, p, seed),
    }
}

/// Shared training preconditions.
fn check_training_set(d: &MimlDataset, min_cases: usize) -> Result<()> {
    d.ensure_valid()?;
    if d.len() < min_cases {
        return Err(MimlError::invalid(format!(
            "training needs at least {min_cases} cases, got {}",
            d.len()
        )));
    }
    Ok(())
}

/// Derives an independent stream seed for a sub-step.
pub(crate) fn sub_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `+1` targets for members of `labels`, `−1` otherwise.
pub(crate) fn sign_targets(labels: &LabelSet, n_labels: usize) -> Vec<f64> {
    (0..n_labels).map(|l| if labels.contains(l) { 1.0 } else { -1.0 }).collect()
}
