use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselearn::KernelSpec;
use crate::distance::BagDistance;
use crate::error::{MimlError, Result};

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| MimlError::invalid(format!("cannot parse `{value}` for parameter `{key}`")))
}

fn unknown(algo: &str, key: &str) -> MimlError {
    MimlError::invalid(format!("{algo} has no parameter `{key}`"))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(MimlError::invalid(format!("{name} must be > 0, got {v}")))
    }
}

fn fraction(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 1.0 {
        Ok(())
    } else {
        Err(MimlError::invalid(format!("{name} must lie in (0, 1], got {v}")))
    }
}

fn at_least_one(name: &str, v: usize) -> Result<()> {
    if v >= 1 {
        Ok(())
    } else {
        Err(MimlError::invalid(format!("{name} must be >= 1")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimlKnnParams {
    /// Nearest neighbours per bag.
    pub r: usize,
    /// Citers: bags that rank the query among their `c` nearest.
    pub c: usize,
    pub distance: BagDistance,
}

impl Default for MimlKnnParams {
    fn default() -> Self {
        MimlKnnParams {
            r: 10,
            c: 20,
            distance: BagDistance::Average,
        }
    }
}

impl MimlKnnParams {
    pub fn validate(&self) -> Result<()> {
        at_least_one("r", self.r)?;
        at_least_one("c", self.c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "r" => self.r = parse(key, value)?,
            "c" => self.c = parse(key, value)?,
            "distance" => self.distance = BagDistance::parse(value)?,
            _ => return Err(unknown("mimlknn", key)),
        }
        self.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimlRbfParams {
    /// Medoids per label as a fraction of that label's positive bags.
    pub alpha: f64,
    /// Width scaling of the hidden RBF units.
    pub mu: f64,
    pub distance: BagDistance,
}

impl Default for MimlRbfParams {
    fn default() -> Self {
        MimlRbfParams {
            alpha: 0.1,
            mu: 0.6,
            distance: BagDistance::Average,
        }
    }
}

impl MimlRbfParams {
    pub fn validate(&self) -> Result<()> {
        fraction("alpha", self.alpha)?;
        positive("mu", self.mu)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "alpha" => self.alpha = parse(key, value)?,
            "mu" => self.mu = parse(key, value)?,
            "distance" => self.distance = BagDistance::parse(value)?,
            _ => return Err(unknown("mimlrbf", key)),
        }
        self.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimlSvmParams {
    /// Medoid bags as a fraction of the training set.
    pub ratio: f64,
    pub kernel: KernelSpec,
    pub cost: f64,
    pub distance: BagDistance,
}

impl Default for MimlSvmParams {
    fn default() -> Self {
        MimlSvmParams {
            ratio: 0.2,
            kernel: KernelSpec::default(),
            cost: 1.0,
            distance: BagDistance::Average,
        }
    }
}

impl MimlSvmParams {
    pub fn validate(&self) -> Result<()> {
        fraction("ratio", self.ratio)?;
        positive("gamma", self.kernel.gamma)?;
        positive("cost", self.cost)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "ratio" => self.ratio = parse(key, value)?,
            "gamma" => self.kernel.gamma = parse(key, value)?,
            "cost" => self.cost = parse(key, value)?,
            "distance" => self.distance = BagDistance::parse(value)?,
            _ => return Err(unknown("mimlsvm", key)),
        }
        self.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimlBoostParams {
    pub rounds: usize,
    /// Cost of the base SVM.
    pub base_cost: f64,
    pub kernel: KernelSpec,
}

impl Default for MimlBoostParams {
    fn default() -> Self {
        MimlBoostParams {
            rounds: 25,
            base_cost: 1.0,
            kernel: KernelSpec::default(),
        }
    }
}

impl MimlBoostParams {
    pub fn validate(&self) -> Result<()> {
        at_least_one("rounds", self.rounds)?;
        positive("base_cost", self.base_cost)?;
        positive("gamma", self.kernel.gamma)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "rounds" => self.rounds = parse(key, value)?,
            "cost" | "base_cost" => self.base_cost = parse(key, value)?,
            "gamma" => self.kernel.gamma = parse(key, value)?,
            _ => return Err(unknown("mimlboost", key)),
        }
        self.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct M3MimlParams {
    pub cost: f64,
    pub max_iters: usize,
    pub step: f64,
}

impl Default for M3MimlParams {
    fn default() -> Self {
        M3MimlParams {
            cost: 1.0,
            max_iters: 2000,
            step: 1e-2,
        }
    }
}

impl M3MimlParams {
    /// `max_iters = 0` is accepted and yields the all-zero model.
    pub fn validate(&self) -> Result<()> {
        positive("cost", self.cost)?;
        positive("step", self.step)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "cost" => self.cost = parse(key, value)?,
            "max_iters" => self.max_iters = parse(key, value)?,
            "step" => self.step = parse(key, value)?,
            _ => return Err(unknown("m3miml", key)),
        }
        self.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KisarParams {
    pub prototypes_per_label: usize,
    pub similarity_gamma: f64,
    pub correlation_weight: f64,
    pub max_iters: usize,
}

impl Default for KisarParams {
    fn default() -> Self {
        KisarParams {
            prototypes_per_label: 10,
            similarity_gamma: 1.0,
            correlation_weight: 0.1,
            max_iters: 2000,
        }
    }
}

impl KisarParams {
    pub fn validate(&self) -> Result<()> {
        at_least_one("prototypes_per_label", self.prototypes_per_label)?;
        positive("similarity_gamma", self.similarity_gamma)?;
        if !(self.correlation_weight >= 0.0 && self.correlation_weight.is_finite()) {
            return Err(MimlError::invalid("correlation_weight must be >= 0"));
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "prototypes_per_label" | "prototypes" => self.prototypes_per_label = parse(key, value)?,
            "similarity_gamma" | "gamma" => self.similarity_gamma = parse(key, value)?,
            "correlation_weight" => self.correlation_weight = parse(key, value)?,
            "max_iters" => self.max_iters = parse(key, value)?,
            _ => return Err(unknown("kisar", key)),
        }
        self.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_published_settings() {
        let knn = MimlKnnParams::default();
        assert_eq!((knn.r, knn.c), (10, 20));
        let rbf = MimlRbfParams::default();
        assert_eq!((rbf.alpha, rbf.mu), (0.1, 0.6));
        let svm = MimlSvmParams::default();
        assert_eq!((svm.ratio, svm.kernel.gamma, svm.cost), (0.2, 1.0, 1.0));
        let boost = MimlBoostParams::default();
        assert_eq!((boost.rounds, boost.base_cost), (25, 1.0));
    }

    #[test]
    fn overrides_validate() {
        let mut p = MimlKnnParams::default();
        p.set("r", "3").unwrap();
        p.set("distance", "max").unwrap();
        assert_eq!(p.r, 3);
        assert_eq!(p.distance, BagDistance::Max);
        assert!(p.set("r", "0").is_err());
        assert!(p.set("k", "1").is_err());
        assert!(p.set("c", "x").is_err());

        let mut s = MimlSvmParams::default();
        assert!(s.set("ratio", "1.5").is_err());
        assert!(s.set("gamma", "-1").is_err());
    }
}
