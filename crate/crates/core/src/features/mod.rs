//! ROI image to histogram instance: optical density, stain separation,
//! and an 8-neighbour LBP histogram of the hematoxylin channel.

mod image;
mod lbp;
mod stain;

pub use image::{decode_ppm, encode_ppm, read_ppm, write_ppm, GrayImage, RgbImage};
pub use lbp::{lbp8_code, lbp8_histogram, LBP_BINS};
pub use stain::{channel_od, rgb_to_od, separate_stains, separate_stains_unclamped, StainMatrix};

use crate::bag::{Bag, FeatureVector};
use crate::error::{MimlError, Result};

/// Nuclei channel of one ROI.
pub fn nuclei_channel(img: &RgbImage, m: &StainMatrix) -> Result<GrayImage> {
    let od = rgb_to_od(img);
    let [h, _, _] = separate_stains(&od, img.width(), img.height(), m)?;
    Ok(h)
}

pub fn extract_instance(img: &RgbImage, m: &StainMatrix) -> Result<FeatureVector> {
    lbp8_histogram(&nuclei_channel(img, m)?)
}

/// One instance per ROI, in the given order.
pub fn extract_case_features_with(rois: &[RgbImage], m: &StainMatrix) -> Result<Bag> {
    if rois.is_empty() {
        return Err(MimlError::invalid("a case needs at least one ROI image"));
    }
    Bag::new(rois.iter().map(|r| extract_instance(r, m)).collect::<Result<_>>()?)
}

pub fn extract_case_features(rois: &[RgbImage]) -> Result<Bag> {
    extract_case_features_with(rois, &StainMatrix::default())
}
