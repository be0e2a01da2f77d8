//! MIML data model: instances, bags, label sets, cases and datasets.

use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{MimlError, Result};

/// Default label vocabulary: the five breast-biopsy diagnosis classes.
pub const DEFAULT_LABEL_NAMES: [&str; 5] = [
    "Non proliferative changes only",
    "Usual ductal hyperplasia",
    "Atypical ductal hyperplasia",
    "Ductal carcinoma in situ",
    "Invasive carcinoma",
];

/// A single instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(MimlError::invalid("feature vector must have dim >= 1"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MimlError::invalid(format!("non-finite feature at index {i}")));
        }
        Ok(FeatureVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub(crate) fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for FeatureVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = MimlError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        FeatureVector::new(v)
    }
}

/// A non-empty set of same-dimension instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FeatureVector>", into = "Vec<FeatureVector>")]
pub struct Bag {
    instances: Vec<FeatureVector>,
}

impl Bag {
    pub fn new(instances: Vec<FeatureVector>) -> Result<Self> {
        let first = instances
            .first()
            .ok_or_else(|| MimlError::invalid("bag must contain at least one instance"))?;
        let dim = first.dim();
        if let Some(bad) = instances.iter().find(|x| x.dim() != dim) {
            return Err(MimlError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Bag { instances })
    }

    /// Convenience constructor from raw rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Bag::new(
            rows.into_iter()
                .map(FeatureVector::new)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn dim(&self) -> usize {
        self.instances[0].dim()
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn instances(&self) -> &[FeatureVector] {
        &self.instances
    }
}

impl Deref for Bag {
    type Target = [FeatureVector];
    fn deref(&self) -> &[FeatureVector] {
        &self.instances
    }
}

impl TryFrom<Vec<FeatureVector>> for Bag {
    type Error = MimlError;
    fn try_from(v: Vec<FeatureVector>) -> Result<Self> {
        Bag::new(v)
    }
}

impl From<Bag> for Vec<FeatureVector> {
    fn from(b: Bag) -> Self {
        b.instances
    }
}

/// Sorted, duplicate-free label indices. The vocabulary size lives in the
/// owning dataset's manifest.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct LabelSet(Vec<usize>);

impl LabelSet {
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        LabelSet(members)
    }

    pub fn empty() -> Self {
        LabelSet(Vec::new())
    }

    pub fn contains(&self, label: usize) -> bool {
        self.0.binary_search(&label).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// 0/1 membership vector of length `n_labels`.
    pub fn indicator(&self, n_labels: usize) -> Vec<f64> {
        let mut v = vec![0.0; n_labels];
        for l in self.iter().filter(|&l| l < n_labels) {
            v[l] = 1.0;
        }
        v
    }

    /// `|self Δ other|`
    pub fn symmetric_difference_len(&self, other: &LabelSet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    n += 1;
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    n += 1;
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        n + (a.len() - i) + (b.len() - j)
    }
}

impl From<Vec<usize>> for LabelSet {
    fn from(v: Vec<usize>) -> Self {
        LabelSet::new(v)
    }
}

impl From<LabelSet> for Vec<usize> {
    fn from(s: LabelSet) -> Self {
        s.0
    }
}

impl FromIterator<usize> for LabelSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        LabelSet::new(iter.into_iter().collect())
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// One (image, expert) pair: a bag of ROI instances plus that expert's labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub case_id: String,
    pub expert_id: String,
    pub labels: LabelSet,
    #[serde(rename = "instances")]
    pub bag: Bag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub dim: usize,
    pub label_names: Vec<String>,
    #[serde(default)]
    pub provenance: String,
}

impl Manifest {
    pub const FORMAT_VERSION: u32 = 1;

    pub fn new(dim: usize, label_names: Vec<String>) -> Self {
        Manifest {
            format_version: Self::FORMAT_VERSION,
            dim,
            label_names,
            provenance: String::new(),
        }
    }

    /// Manifest using the five-class diagnosis vocabulary.
    pub fn with_default_labels(dim: usize) -> Self {
        Manifest::new(dim, DEFAULT_LABEL_NAMES.iter().map(|s| s.to_string()).collect())
    }

    pub fn n_labels(&self) -> usize {
        self.label_names.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MimlDataset {
    pub manifest: Manifest,
    pub cases: Vec<Case>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Dimension,
    Vocabulary,
    DuplicateCaseId,
    NonFinite,
    Manifest,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Dimension => "dimension",
            ViolationKind::Vocabulary => "vocabulary",
            ViolationKind::DuplicateCaseId => "duplicate-case-id",
            ViolationKind::NonFinite => "non-finite",
            ViolationKind::Manifest => "manifest",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Empty for manifest-level violations.
    pub case_id: String,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.case_id.is_empty() {
            write!(f, "[{}] {}", self.kind, self.detail)
        } else {
            write!(f, "case `{}` [{}] {}", self.case_id, self.kind, self.detail)
        }
    }
}

impl MimlDataset {
    pub fn new(manifest: Manifest, cases: Vec<Case>) -> Self {
        MimlDataset { manifest, cases }
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn n_labels(&self) -> usize {
        self.manifest.n_labels()
    }

    pub fn dim(&self) -> usize {
        self.manifest.dim
    }

    pub fn bags(&self) -> Vec<&Bag> {
        self.cases.iter().map(|c| &c.bag).collect()
    }

    /// Number of cases carrying each label.
    pub fn label_counts(&self) -> Vec<usize> {
        let n_labels = self.n_labels();
        let mut counts = vec![0; n_labels];
        for c in &self.cases {
            for l in c.labels.iter().filter(|&l| l < n_labels) {
                counts[l] += 1;
            }
        }
        counts
    }

    /// Checks every invariant; returns `Err(Validation)` if any fails.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_dataset(self);
        if report.is_empty() {
            Ok(())
        } else {
            Err(MimlError::Validation(report))
        }
    }
}

/// Collects every invariant violation of `d`. Empty iff the dataset is well formed.
pub fn validate_dataset(d: &MimlDataset) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = &d.manifest;
    if m.dim == 0 {
        out.push(Violation {
            case_id: String::new(),
            kind: ViolationKind::Manifest,
            detail: "dim must be >= 1".into(),
        });
    }
    if m.label_names.is_empty() {
        out.push(Violation {
            case_id: String::new(),
            kind: ViolationKind::Manifest,
            detail: "label_names must be non-empty".into(),
        });
    }
    let mut names = HashSet::new();
    for n in &m.label_names {
        if !names.insert(n.as_str()) {
            out.push(Violation {
                case_id: String::new(),
                kind: ViolationKind::Manifest,
                detail: format!("duplicate label name `{n}`"),
            });
        }
    }

    let n_labels = m.n_labels();
    let mut ids = HashSet::new();
    for c in &d.cases {
        if !ids.insert(c.case_id.as_str()) {
            out.push(Violation {
                case_id: c.case_id.clone(),
                kind: ViolationKind::DuplicateCaseId,
                detail: "case_id appears more than once".into(),
            });
        }
        if c.bag.dim() != m.dim {
            out.push(Violation {
                case_id: c.case_id.clone(),
                kind: ViolationKind::Dimension,
                detail: format!("instance dim {} but manifest dim {}", c.bag.dim(), m.dim),
            });
        }
        if c.bag.iter().any(|x| !x.is_finite()) {
            out.push(Violation {
                case_id: c.case_id.clone(),
                kind: ViolationKind::NonFinite,
                detail: "instance contains a non-finite value".into(),
            });
        }
        for l in c.labels.iter().filter(|&l| l >= n_labels) {
            out.push(Violation {
                case_id: c.case_id.clone(),
                kind: ViolationKind::Vocabulary,
                detail: format!("label index {l} outside vocabulary of size {n_labels}"),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(id: &str, rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Case {
        Case {
            case_id: id.into(),
            expert_id: "e1".into(),
            labels: LabelSet::new(labels),
            bag: Bag::from_rows(rows).unwrap(),
        }
    }

    #[test]
    fn empty_bag_rejected() {
        assert!(matches!(Bag::new(vec![]), Err(MimlError::InvalidArgument(_))));
    }

    #[test]
    fn ragged_bag_rejected() {
        let err = Bag::from_rows(vec![vec![1.0, 2.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, MimlError::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn non_finite_feature_rejected() {
        assert!(FeatureVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(FeatureVector::new(vec![]).is_err());
    }

    #[test]
    fn label_set_normalizes() {
        let s = LabelSet::new(vec![3, 1, 3, 0]);
        assert_eq!(s.as_slice(), &[0, 1, 3]);
        assert_eq!(s.indicator(4), vec![1.0, 1.0, 0.0, 1.0]);
        assert_eq!(s.symmetric_difference_len(&LabelSet::new(vec![1, 2])), 3);
        assert_eq!(s.to_string(), "0;1;3");
    }

    #[test]
    fn well_formed_dataset_has_empty_report() {
        let d = MimlDataset::new(
            Manifest::with_default_labels(2),
            vec![case("a", vec![vec![0.0, 1.0]], vec![0, 4]), case("b", vec![vec![1.0, 1.0]], vec![])],
        );
        assert!(validate_dataset(&d).is_empty());
        d.ensure_valid().unwrap();
    }

    #[test]
    fn dimension_violation_names_case() {
        let good = vec![vec![0.0; 256]];
        let bad = vec![vec![0.0; 255]];
        let d = MimlDataset::new(
            Manifest::with_default_labels(256),
            vec![case("ok", good, vec![0]), case("short", bad, vec![1])],
        );
        let report = validate_dataset(&d);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].case_id, "short");
        assert_eq!(report[0].kind, ViolationKind::Dimension);
    }

    #[test]
    fn vocabulary_violation() {
        let d = MimlDataset::new(
            Manifest::with_default_labels(1),
            vec![case("x", vec![vec![0.5]], vec![5])],
        );
        let report = validate_dataset(&d);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].kind, ViolationKind::Vocabulary);
        assert_eq!(report[0].case_id, "x");
    }

    #[test]
    fn duplicate_ids_reported() {
        let d = MimlDataset::new(
            Manifest::with_default_labels(1),
            vec![case("x", vec![vec![0.5]], vec![0]), case("x", vec![vec![0.7]], vec![1])],
        );
        let report = validate_dataset(&d);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].kind, ViolationKind::DuplicateCaseId);
    }
}
