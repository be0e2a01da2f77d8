use super::image::GrayImage;
use crate::bag::FeatureVector;
use crate::error::{MimlError, Result};

pub const LBP_BINS: usize = 256;

/// Neighbour offsets, clockwise from top-left; the first is the most significant bit.
const NEIGHBOURS: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0)];

/// Code of a row-major 3×3 window.
pub fn lbp8_code(window: &[f64; 9]) -> u8 {
    let centre = window[4];
    NEIGHBOURS.iter().fold(0u8, |code, &(dx, dy)| {
        let v = window[((1 + dy) * 3 + 1 + dx) as usize];
        (code << 1) | u8::from(v >= centre)
    })
}

pub fn lbp8_histogram(img: &GrayImage) -> Result<FeatureVector> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(MimlError::invalid(format!("LBP needs at least a 3x3 image, got {w}x{h}")));
    }
    let mut counts = vec![0u64; LBP_BINS];
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let mut window = [0.0; 9];
            for (k, v) in window.iter_mut().enumerate() {
                *v = img.get(x + k % 3 - 1, y + k / 3 - 1);
            }
            counts[usize::from(lbp8_code(&window))] += 1;
        }
    }
    let total = ((w - 2) * (h - 2)) as f64;
    FeatureVector::new(counts.into_iter().map(|c| c as f64 / total).collect())
}
