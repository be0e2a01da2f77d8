use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;

use super::image::{GrayImage, RgbImage};
use crate::error::{MimlError, Result};

const DEFAULT_STAINS: &str = include_str!("stains.json");

/// Per-channel optical density, `−log10((I + 1) / 256)`.
pub fn channel_od(i: u8) -> f64 {
    -((f64::from(i) + 1.0) / 256.0).log10()
}

pub fn rgb_to_od(img: &RgbImage) -> Vec<[f64; 3]> {
    img.pixels()
        .iter()
        .map(|p| [channel_od(p[0]), channel_od(p[1]), channel_od(p[2])])
        .collect()
}

#[derive(Debug, Deserialize)]
struct StainConfig {
    hematoxylin: [f64; 3],
    eosin: [f64; 3],
    #[serde(default)]
    residual: Option<[f64; 3]>,
}

/// Columns are unit OD vectors for hematoxylin, eosin and a residual channel.
#[derive(Debug, Clone, PartialEq)]
pub struct StainMatrix {
    matrix: Matrix3<f64>,
    inverse: Matrix3<f64>,
}

fn unit(v: [f64; 3]) -> Result<Vector3<f64>> {
    let v = Vector3::from(v);
    let n = v.norm();
    if !n.is_finite() || n == 0.0 {
        return Err(MimlError::invalid("stain vector must be finite and nonzero"));
    }
    Ok(v / n)
}

/// Complement of two unit stains: per component `sqrt(max(0, 1 − h² − e²))`.
fn complement(h: &Vector3<f64>, e: &Vector3<f64>) -> Vector3<f64> {
    Vector3::from_fn(|i, _| (1.0 - h[i] * h[i] - e[i] * e[i]).max(0.0).sqrt())
}

impl StainMatrix {
    pub fn new(hematoxylin: [f64; 3], eosin: [f64; 3], residual: Option<[f64; 3]>) -> Result<Self> {
        let h = unit(hematoxylin)?;
        let e = unit(eosin)?;
        let r = match residual {
            Some(r) => unit(r)?,
            None => unit(complement(&h, &e).into())?,
        };
        let matrix = Matrix3::from_columns(&[h, e, r]);
        let inverse = matrix
            .try_inverse()
            .filter(|m| m.iter().all(|v| v.is_finite()))
            .ok_or_else(|| MimlError::invalid("stain matrix is singular"))?;
        Ok(StainMatrix { matrix, inverse })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: StainConfig = serde_json::from_str(s)?;
        Self::new(cfg.hematoxylin, cfg.eosin, cfg.residual)
    }

    pub fn column(&self, k: usize) -> [f64; 3] {
        self.matrix.column(k).into_owned().into()
    }

    /// OD produced by the concentration triple `c`.
    pub fn mix(&self, c: [f64; 3]) -> [f64; 3] {
        (self.matrix * Vector3::from(c)).into()
    }

    pub fn unmix(&self, od: [f64; 3]) -> [f64; 3] {
        (self.inverse * Vector3::from(od)).into()
    }
}

impl Default for StainMatrix {
    fn default() -> Self {
        Self::from_json(DEFAULT_STAINS).expect("bundled stain vectors are valid")
    }
}

/// Concentration maps without clamping, hematoxylin first.
pub fn separate_stains_unclamped(od: &[[f64; 3]], m: &StainMatrix) -> Vec<[f64; 3]> {
    od.iter().map(|&p| m.unmix(p)).collect()
}

/// Hematoxylin, eosin and residual concentration maps, clamped at 0.
pub fn separate_stains(od: &[[f64; 3]], width: usize, height: usize, m: &StainMatrix) -> Result<[GrayImage; 3]> {
    let mut maps = [Vec::new(), Vec::new(), Vec::new()];
    for c in separate_stains_unclamped(od, m) {
        for k in 0..3 {
            maps[k].push(c[k].max(0.0));
        }
    }
    let [h, e, r] = maps;
    Ok([
        GrayImage::new(width, height, h)?,
        GrayImage::new(width, height, e)?,
        GrayImage::new(width, height, r)?,
    ])
}
