//! Multi-label evaluation: hamming loss, one-error, coverage, ranking loss
//! and average precision.
//!
//! Conventions: ranks are 1-based with ties broken toward the lower label
//! index; ranking loss counts tied pairs as misordered. Cases for which a
//! metric is undefined (empty truth, or full truth for ranking loss) are
//! excluded from that metric's average and the number of included cases is
//! reported.

use serde::{Deserialize, Serialize};

use crate::bag::LabelSet;
use crate::error::{MimlError, Result};

/// Per-label ranks, `1` = best.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector(Vec<usize>);

impl RankVector {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self, label: usize) -> usize {
        self.0[label]
    }

    /// The label holding rank 1.
    pub fn top(&self) -> usize {
        self.0.iter().position(|&r| r == 1).expect("rank vector is a bijection")
    }
}

pub fn rank_labels(scores: &[f64]) -> Result<RankVector> {
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(MimlError::invalid(format!("non-finite score at label {i}")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // Stable sort keeps lower indices first among equal scores.
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut ranks = vec![0; scores.len()];
    for (pos, &l) in order.iter().enumerate() {
        ranks[l] = pos + 1;
    }
    Ok(RankVector(ranks))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub hamming_loss: f64,
    pub one_error: f64,
    pub ranking_loss: f64,
    pub coverage: f64,
    pub average_precision: f64,
    pub n_cases: MetricCounts,
}

/// Number of cases that entered each metric's average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MetricCounts {
    pub hamming_loss: usize,
    pub one_error: usize,
    pub ranking_loss: usize,
    pub coverage: usize,
    pub average_precision: usize,
}

impl EvalReport {
    /// Values in table column order: h.l., o.e., r.l., co., a.p.
    pub fn as_row(&self) -> [f64; 5] {
        [
            self.hamming_loss,
            self.one_error,
            self.ranking_loss,
            self.coverage,
            self.average_precision,
        ]
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(MimlError::invalid(format!("{a} predictions for {b} ground-truth sets")));
    }
    Ok(())
}

/// `(1/N) Σ |decidedᵢ Δ truthᵢ| / L`
pub fn hamming_loss(decided: &[LabelSet], truth: &[LabelSet], n_labels: usize) -> Result<f64> {
    check_lengths(decided.len(), truth.len())?;
    if truth.is_empty() {
        return Err(MimlError::UndefinedMetric("hamming_loss"));
    }
    if n_labels == 0 {
        return Err(MimlError::invalid("hamming loss needs L >= 1"));
    }
    let total: usize = decided
        .iter()
        .zip(truth)
        .map(|(d, t)| d.symmetric_difference_len(t))
        .sum();
    Ok(total as f64 / (truth.len() * n_labels) as f64)
}

/// Shared driver: averages `per_case` over cases it returns `Some` for.
fn mean_over<F>(scores: &[Vec<f64>], truth: &[LabelSet], name: &'static str, per_case: F) -> Result<(f64, usize)>
where
    F: Fn(&[f64], &RankVector, &LabelSet) -> Option<f64>,
{
    check_lengths(scores.len(), truth.len())?;
    let mut sum = 0.0;
    let mut used = 0;
    for (s, t) in scores.iter().zip(truth) {
        if let Some(l) = t.iter().find(|&l| l >= s.len()) {
            return Err(MimlError::invalid(format!("truth label {l} outside score vector of length {}", s.len())));
        }
        let ranks = rank_labels(s)?;
        if let Some(v) = per_case(s, &ranks, t) {
            sum += v;
            used += 1;
        }
    }
    if used == 0 {
        return Err(MimlError::UndefinedMetric(name));
    }
    Ok((sum / used as f64, used))
}

fn one_error_case(_: &[f64], ranks: &RankVector, truth: &LabelSet) -> Option<f64> {
    (!truth.is_empty()).then(|| if truth.contains(ranks.top()) { 0.0 } else { 1.0 })
}

fn coverage_case(_: &[f64], ranks: &RankVector, truth: &LabelSet) -> Option<f64> {
    let worst = truth.iter().map(|l| ranks.rank(l)).max()?;
    Some((worst - 1) as f64)
}

fn ranking_loss_case(scores: &[f64], _: &RankVector, truth: &LabelSet) -> Option<f64> {
    let l = scores.len();
    if truth.is_empty() || truth.len() == l {
        return None;
    }
    let mut bad = 0usize;
    for y in truth.iter() {
        for other in (0..l).filter(|&o| !truth.contains(o)) {
            if scores[y] <= scores[other] {
                bad += 1;
            }
        }
    }
    Some(bad as f64 / (truth.len() * (l - truth.len())) as f64)
}

fn average_precision_case(_: &[f64], ranks: &RankVector, truth: &LabelSet) -> Option<f64> {
    if truth.is_empty() {
        return None;
    }
    let proper: Vec<usize> = truth.iter().map(|l| ranks.rank(l)).collect();
    let total: f64 = proper
        .iter()
        .map(|&r| proper.iter().filter(|&&r2| r2 <= r).count() as f64 / r as f64)
        .sum();
    Some(total / truth.len() as f64)
}

pub fn one_error(scores: &[Vec<f64>], truth: &[LabelSet]) -> Result<f64> {
    mean_over(scores, truth, "one_error", one_error_case).map(|r| r.0)
}

pub fn coverage(scores: &[Vec<f64>], truth: &[LabelSet]) -> Result<f64> {
    mean_over(scores, truth, "coverage", coverage_case).map(|r| r.0)
}

pub fn ranking_loss(scores: &[Vec<f64>], truth: &[LabelSet]) -> Result<f64> {
    mean_over(scores, truth, "ranking_loss", ranking_loss_case).map(|r| r.0)
}

pub fn average_precision(scores: &[Vec<f64>], truth: &[LabelSet]) -> Result<f64> {
    mean_over(scores, truth, "average_precision", average_precision_case).map(|r| r.0)
}

pub fn evaluate_all(
    scores: &[Vec<f64>],
    decided: &[LabelSet],
    truth: &[LabelSet],
    n_labels: usize,
) -> Result<EvalReport> {
    check_lengths(scores.len(), truth.len())?;
    if let Some(s) = scores.iter().find(|s| s.len() != n_labels) {
        return Err(MimlError::DimensionMismatch {
            expected: n_labels,
            found: s.len(),
        });
    }
    let hl = hamming_loss(decided, truth, n_labels)?;
    let (oe, n_oe) = mean_over(scores, truth, "one_error", one_error_case)?;
    let (rl, n_rl) = mean_over(scores, truth, "ranking_loss", ranking_loss_case)?;
    let (co, n_co) = mean_over(scores, truth, "coverage", coverage_case)?;
    let (ap, n_ap) = mean_over(scores, truth, "average_precision", average_precision_case)?;
    Ok(EvalReport {
        hamming_loss: hl,
        one_error: oe,
        ranking_loss: rl,
        coverage: co,
        average_precision: ap,
        n_cases: MetricCounts {
            hamming_loss: truth.len(),
            one_error: n_oe,
            ranking_loss: n_rl,
            coverage: n_co,
            average_precision: n_ap,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(v: &[usize]) -> LabelSet {
        LabelSet::new(v.to_vec())
    }

    const HAND: [f64; 3] = [0.9, 0.2, 0.5];

    #[test]
    fn ranks() {
        assert_eq!(rank_labels(&HAND).unwrap().ranks(), &[1, 3, 2]);
        assert_eq!(rank_labels(&[0.5, 0.5]).unwrap().ranks(), &[1, 2]);
        assert_eq!(rank_labels(&[7.0; 3]).unwrap().ranks(), &[1, 2, 3]);
        assert!(rank_labels(&[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn hamming_examples() {
        let t = vec![ls(&[1, 2])];
        assert_eq!(hamming_loss(&t, &t, 5).unwrap(), 0.0);
        assert_eq!(hamming_loss(&[ls(&[0, 1])], &t, 5).unwrap(), 0.4);
        assert_eq!(hamming_loss(&[ls(&[0, 3, 4])], &t, 5).unwrap(), 1.0);
        assert!(hamming_loss(&[], &t, 5).is_err());
    }

    #[test]
    fn hand_worked_case() {
        let s = vec![HAND.to_vec()];
        assert_eq!(one_error(&s, &[ls(&[0])]).unwrap(), 0.0);
        assert_eq!(one_error(&s, &[ls(&[1])]).unwrap(), 1.0);
        assert_eq!(one_error(&s, &[ls(&[0, 1, 2])]).unwrap(), 0.0);
        assert_eq!(coverage(&s, &[ls(&[0, 2])]).unwrap(), 1.0);
        assert_eq!(coverage(&s, &[ls(&[0, 1, 2])]).unwrap(), 2.0);
        assert_eq!(coverage(&s, &[ls(&[1])]).unwrap(), 2.0);
        assert_eq!(ranking_loss(&s, &[ls(&[0, 2])]).unwrap(), 0.0);
        assert_eq!(ranking_loss(&s, &[ls(&[1])]).unwrap(), 1.0);
        assert_eq!(ranking_loss(&[vec![0.3, 0.3]], &[ls(&[0])]).unwrap(), 1.0);
        assert_eq!(average_precision(&s, &[ls(&[0, 2])]).unwrap(), 1.0);
        assert!((average_precision(&s, &[ls(&[1])]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn undefined_metrics() {
        let s = vec![HAND.to_vec()];
        assert!(matches!(one_error(&s, &[ls(&[])]), Err(MimlError::UndefinedMetric(_))));
        assert!(matches!(ranking_loss(&s, &[ls(&[0, 1, 2])]), Err(MimlError::UndefinedMetric(_))));
        assert!(matches!(average_precision(&s, &[ls(&[])]), Err(MimlError::UndefinedMetric(_))));
    }

    #[test]
    fn evaluate_all_composes() {
        let r = evaluate_all(&[HAND.to_vec()], &[ls(&[0, 2])], &[ls(&[0, 2])], 3).unwrap();
        assert_eq!(r.as_row(), [0.0, 0.0, 0.0, 1.0, 1.0]);

        // Perfect predictions: coverage = mean(|truth| − 1)
        let truth = vec![ls(&[0]), ls(&[1, 2]), ls(&[0, 1, 2])];
        let scores: Vec<Vec<f64>> = truth
            .iter()
            .map(|t| (0..3).map(|l| if t.contains(l) { 1.0 } else { -1.0 }).collect())
            .collect();
        let r = evaluate_all(&scores, &truth, &truth, 3).unwrap();
        assert_eq!(r.as_row(), [0.0, 0.0, 0.0, 1.0, 1.0]);
        assert_eq!(r.n_cases.ranking_loss, 2);
        assert_eq!(r.n_cases.coverage, 3);
    }

    #[test]
    fn excludes_degenerate_cases_per_metric() {
        let scores = vec![HAND.to_vec(), HAND.to_vec()];
        let truth = vec![ls(&[]), ls(&[1])];
        let r = evaluate_all(&scores, &[ls(&[0]), ls(&[1])], &truth, 3).unwrap();
        assert_eq!(r.one_error, 1.0);
        assert_eq!(r.n_cases.one_error, 1);
        assert_eq!(r.n_cases.hamming_loss, 2);
        assert!((r.hamming_loss - 1.0 / 6.0).abs() < 1e-15);
    }
}
