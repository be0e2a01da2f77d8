//! Small hand-built datasets with known answers, shared by unit and integration tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bag::{Bag, Case, FeatureVector, LabelSet, Manifest, MimlDataset};
use crate::distance::squared_euclidean_unchecked;

/// Centres of the easy fixture: background, label 0, label 1.
pub const EASY_CENTRES: [[f64; 2]; 3] = [[0.0, 0.0], [0.0, 10.0], [10.0, 0.0]];
const EASY_JITTER: f64 = 0.1;
const EASY_SEED: u64 = 0xea5e;

fn jittered(rng: &mut ChaCha8Rng, centre: [f64; 2]) -> Vec<f64> {
    centre
        .iter()
        .map(|c| c + rng.random_range(-EASY_JITTER..=EASY_JITTER))
        .collect()
}

/// Bag with one background instance plus one instance per label in `labels`.
pub fn easy_bag(labels: &[usize], seed: u64) -> Bag {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![jittered(&mut rng, EASY_CENTRES[0])];
    for &l in labels {
        rows.push(jittered(&mut rng, EASY_CENTRES[l + 1]));
    }
    Bag::from_rows(rows).expect("fixture rows are well-formed")
}

/// Twelve 2-D bags over two labels: four {0}, five {1}, three {0, 1}.
pub fn d_easy() -> MimlDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(EASY_SEED);
    let groups: [(&[usize], usize); 3] = [(&[0], 4), (&[1], 5), (&[0, 1], 3)];
    let mut cases = Vec::new();
    for (labels, count) in groups {
        for k in 0..count {
            let mut rows = vec![jittered(&mut rng, EASY_CENTRES[0])];
            for &l in labels.iter() {
                rows.push(jittered(&mut rng, EASY_CENTRES[l + 1]));
            }
            if k % 2 == 1 {
                rows.reverse();
            }
            cases.push(Case {
                case_id: format!("easy-{}", cases.len()),
                expert_id: "fixture".into(),
                labels: LabelSet::new(labels.to_vec()),
                bag: Bag::from_rows(rows).expect("fixture rows are well-formed"),
            });
        }
    }
    MimlDataset::new(Manifest::new(2, vec!["label0".into(), "label1".into()]), cases)
}

/// Reference labelling: each instance goes to its nearest centre, and the
/// bag takes every non-background label hit.
pub fn easy_oracle(bag: &Bag) -> LabelSet {
    let mut labels = Vec::new();
    for x in bag.iter() {
        let nearest = nearest_centre(x);
        if nearest > 0 {
            labels.push(nearest - 1);
        }
    }
    LabelSet::new(labels)
}

fn nearest_centre(x: &FeatureVector) -> usize {
    (0..EASY_CENTRES.len())
        .min_by(|&a, &b| {
            squared_euclidean_unchecked(x, &EASY_CENTRES[a])
                .total_cmp(&squared_euclidean_unchecked(x, &EASY_CENTRES[b]))
        })
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_recovers_every_fixture_bag() {
        let d = d_easy();
        assert_eq!(d.len(), 12);
        assert!(d.ensure_valid().is_ok());
        for c in &d.cases {
            assert_eq!(easy_oracle(&c.bag), c.labels, "{}", c.case_id);
        }
    }

    #[test]
    fn oracle_is_exhaustive_over_jitter_box() {
        // Every point within the jitter box of a centre is closer to it than to any other centre.
        let steps = 20;
        for (ci, centre) in EASY_CENTRES.iter().enumerate() {
            for i in 0..=steps {
                for j in 0..=steps {
                    let dx = -EASY_JITTER + 2.0 * EASY_JITTER * i as f64 / steps as f64;
                    let dy = -EASY_JITTER + 2.0 * EASY_JITTER * j as f64 / steps as f64;
                    let x = FeatureVector::new(vec![centre[0] + dx, centre[1] + dy]).unwrap();
                    assert_eq!(nearest_centre(&x), ci);
                }
            }
        }
    }

    #[test]
    fn easy_bag_matches_oracle() {
        for labels in [&[0usize][..], &[1], &[0, 1], &[]] {
            assert_eq!(easy_oracle(&easy_bag(labels, 7)).as_slice(), labels);
        }
    }
}
