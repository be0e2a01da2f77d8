use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::bag::{Bag, Case, LabelSet, Manifest, MimlDataset};
use crate::error::{MimlError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_bags: usize,
    pub n_labels: usize,
    pub dim: usize,
    pub instances_per_label: usize,
    pub background_instances: usize,
    pub sigma: f64,
    pub separation: f64,
    /// `cardinality[k]` is the probability that a bag carries `k + 1` labels.
    pub cardinality: Vec<f64>,
}

impl SynthConfig {
    /// Cardinality 1, 2, 3 with probabilities 0.6, 0.3, 0.1, truncated to `n_labels`.
    pub fn new(n_bags: usize, n_labels: usize, dim: usize) -> Self {
        let mut cardinality: Vec<f64> = [0.6, 0.3, 0.1].into_iter().take(n_labels.max(1)).collect();
        let total: f64 = cardinality.iter().sum();
        cardinality.iter_mut().for_each(|p| *p /= total);
        SynthConfig {
            n_bags,
            n_labels,
            dim,
            instances_per_label: 2,
            background_instances: 1,
            sigma: 0.5,
            separation: 5.0,
            cardinality,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_bags == 0 || self.n_labels == 0 || self.dim == 0 || self.instances_per_label == 0 {
            return Err(MimlError::invalid("bag, label, dim and per-label instance counts must be positive"));
        }
        if self.n_labels > 2 * self.dim {
            return Err(MimlError::invalid(format!(
                "cannot place {} separated centres in {} dimensions",
                self.n_labels, self.dim
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) || !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(MimlError::invalid("sigma and separation must be positive"));
        }
        if self.cardinality.is_empty()
            || self.cardinality.len() > self.n_labels
            || self.cardinality.iter().any(|p| !(*p >= 0.0))
            || (self.cardinality.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(MimlError::invalid("cardinality must be a distribution over 1..=L"));
        }
        Ok(())
    }

    /// Expected fraction of bags carrying any one label.
    pub fn label_marginal(&self) -> f64 {
        let mean: f64 = self.cardinality.iter().enumerate().map(|(k, p)| (k + 1) as f64 * p).sum();
        mean / self.n_labels as f64
    }
}

/// Centre of label `l`: `+sep·e_l`, then `−sep·e_{l−dim}` once the axes run out.
pub fn label_centre(cfg: &SynthConfig, l: usize) -> Vec<f64> {
    let mut c = vec![0.0; cfg.dim];
    if l < cfg.dim {
        c[l] = cfg.separation;
    } else {
        c[l - cfg.dim] = -cfg.separation;
    }
    c
}

pub fn generate_synthetic(cfg: &SynthConfig, seed: u64) -> Result<MimlDataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let card = WeightedIndex::new(&cfg.cardinality).map_err(|e| MimlError::invalid(e.to_string()))?;
    let noise = Normal::new(0.0, cfg.sigma).map_err(|e| MimlError::invalid(e.to_string()))?;
    let centres: Vec<Vec<f64>> = (0..cfg.n_labels).map(|l| label_centre(cfg, l)).collect();
    let origin = vec![0.0; cfg.dim];

    let mut cases = Vec::with_capacity(cfg.n_bags);
    for i in 0..cfg.n_bags {
        let k = card.sample(&mut rng) + 1;
        let labels = LabelSet::new(index::sample(&mut rng, cfg.n_labels, k).into_vec());
        let mut rows = Vec::new();
        for l in labels.iter() {
            for _ in 0..cfg.instances_per_label {
                rows.push(centres[l].iter().map(|c| c + noise.sample(&mut rng)).collect());
            }
        }
        for _ in 0..cfg.background_instances {
            rows.push(origin.iter().map(|c| c + noise.sample(&mut rng)).collect::<Vec<f64>>());
        }
        rows.shuffle(&mut rng);
        cases.push(Case {
            case_id: format!("synth-{i:05}"),
            expert_id: "synthetic".into(),
            labels,
            bag: Bag::from_rows(rows)?,
        });
    }
    let names = (0..cfg.n_labels).map(|l| format!("label{l}")).collect();
    let mut manifest = Manifest::new(cfg.dim, names);
    manifest.provenance = format!(
        "synthetic seed={seed} bags={} labels={} dim={} sigma={} sep={}",
        cfg.n_bags, cfg.n_labels, cfg.dim, cfg.sigma, cfg.separation
    );
    Ok(MimlDataset::new(manifest, cases))
}
