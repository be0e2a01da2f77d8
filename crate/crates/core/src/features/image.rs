use std::io::Write;
use std::path::Path;

use crate::error::{MimlError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(MimlError::invalid("image dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(MimlError::DimensionMismatch {
                expected: width * height,
                found: pixels.len(),
            });
        }
        Ok(RgbImage { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(MimlError::DimensionMismatch {
                expected: width * height,
                found: pixels.len(),
            });
        }
        if pixels.iter().any(|v| !v.is_finite()) {
            return Err(MimlError::invalid("gray intensities must be finite"));
        }
        Ok(GrayImage { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }
}

fn header_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    (start < *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

/// Decodes a binary PPM (P6, maxval 255).
pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let bad = |m: &str| MimlError::invalid(format!("ppm: {m}"));
    let mut pos = 0;
    if header_token(bytes, &mut pos).as_deref() != Some("P6") {
        return Err(bad("missing P6 magic"));
    }
    let mut fields = [0usize; 3];
    for f in fields.iter_mut() {
        *f = header_token(bytes, &mut pos)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("malformed header"))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("malformed header"));
    }
    pos += 1;
    let data = &bytes[pos..];
    if data.len() < width * height * 3 {
        return Err(bad("truncated pixel data"));
    }
    let pixels = data[..width * height * 3]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    RgbImage::new(width, height, pixels)
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    for p in &img.pixels {
        out.extend_from_slice(p);
    }
    out
}

pub fn read_ppm(path: &Path) -> Result<RgbImage> {
    let bytes = std::fs::read(path).map_err(|e| MimlError::io(path, e))?;
    decode_ppm(&bytes).map_err(|e| MimlError::invalid(format!("{}: {e}", path.display())))
}

pub fn write_ppm(img: &RgbImage, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| MimlError::io(path, e))?;
    f.write_all(&encode_ppm(img)).map_err(|e| MimlError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_round_trip() {
        let img = RgbImage::new(2, 2, vec![[1, 2, 3], [4, 5, 6], [7, 8, 9], [255, 0, 128]]).unwrap();
        assert_eq!(decode_ppm(&encode_ppm(&img)).unwrap(), img);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P6 # made by hand\n1 1\n# depth\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 20, 30]);
        assert_eq!(decode_ppm(&bytes).unwrap().get(0, 0), [10, 20, 30]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(decode_ppm(b"P3\n1 1\n255\n1 2 3").is_err());
        assert!(decode_ppm(b"P6\n2 2\n255\n\x01\x02").is_err());
        assert!(decode_ppm(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00").is_err());
        assert!(RgbImage::new(2, 1, vec![[0; 3]]).is_err());
    }
}
