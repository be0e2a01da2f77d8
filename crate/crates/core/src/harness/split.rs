use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bag::MimlDataset;
use crate::error::{MimlError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: MimlDataset,
    pub test: MimlDataset,
    /// Cases removed for having no labels.
    pub dropped: usize,
}

/// Label-stratified train/test partition.
///
/// Cases without labels are dropped. The rest are assigned label by label,
/// rarest remaining label first, each case going to the side that still
/// wants the most of that label (then the most cases overall, then train).
/// Case order within a label comes from a seeded shuffle.
pub fn stratified_split(d: &MimlDataset, train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(MimlError::invalid(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    if d.len() < 2 {
        return Err(MimlError::invalid("splitting needs at least 2 cases"));
    }
    let n_labels = d.n_labels();
    let kept: Vec<usize> = (0..d.len()).filter(|&i| !d.cases[i].labels.is_empty()).collect();
    let dropped = d.len() - kept.len();

    let mut order = kept.clone();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let fractions = [train_fraction, 1.0 - train_fraction];
    let mut want_total = fractions.map(|f| f * kept.len() as f64);
    let mut want_label = fractions.map(|f| {
        let counts = {
            let mut c = vec![0.0; n_labels];
            for &i in &kept {
                for l in d.cases[i].labels.iter() {
                    c[l] += 1.0;
                }
            }
            c
        };
        counts.into_iter().map(|c| c * f).collect::<Vec<f64>>()
    });

    let mut side: Vec<Option<usize>> = vec![None; d.len()];
    let mut remaining = kept.len();
    while remaining > 0 {
        let mut left = vec![0usize; n_labels];
        for &i in &order {
            if side[i].is_none() {
                for l in d.cases[i].labels.iter() {
                    left[l] += 1;
                }
            }
        }
        let Some(label) = (0..n_labels).filter(|&l| left[l] > 0).min_by_key(|&l| (left[l], l)) else {
            break;
        };
        for &i in &order {
            if side[i].is_some() || !d.cases[i].labels.contains(label) {
                continue;
            }
            let s = if want_label[0][label] > want_label[1][label] {
                0
            } else if want_label[1][label] > want_label[0][label] {
                1
            } else if want_total[1] > want_total[0] {
                1
            } else {
                0
            };
            side[i] = Some(s);
            want_total[s] -= 1.0;
            for l in d.cases[i].labels.iter() {
                want_label[s][l] -= 1.0;
            }
            remaining -= 1;
        }
    }

    let pick = |s: usize| {
        let cases = (0..d.len())
            .filter(|&i| side[i] == Some(s))
            .map(|i| d.cases[i].clone())
            .collect();
        MimlDataset::new(d.manifest.clone(), cases)
    };
    Ok(Split {
        train: pick(0),
        test: pick(1),
        dropped,
    })
}
