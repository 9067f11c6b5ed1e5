//! Binary greymap (P5, maxval 255) reading and writing.

use std::fs;
use std::path::Path;

use tplcnn_core::Grid;

use crate::error::{CliError, Result};

/// 8-bit greyscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub pixels: Grid<u8>,
}

impl GrayImage {
    pub fn new(pixels: Grid<u8>) -> Self {
        GrayImage { pixels }
    }

    pub fn width(&self) -> usize {
        self.pixels.cols()
    }

    pub fn height(&self) -> usize {
        self.pixels.rows()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width(), self.height()).into_bytes();
        out.extend_from_slice(self.pixels.as_slice());
        out
    }

    pub fn decode(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut pos = 0;
        let mut fields = [0usize; 3];
        let magic = next_token(bytes, &mut pos).ok_or("missing magic")?;
        if magic != b"P5" {
            return Err(format!("not a binary PGM (magic {:?})", String::from_utf8_lossy(magic)));
        }
        for (i, name) in ["width", "height", "maxval"].iter().enumerate() {
            let tok = next_token(bytes, &mut pos).ok_or_else(|| format!("missing {name}"))?;
            fields[i] = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format!("bad {name}"))?;
        }
        let [width, height, maxval] = fields;
        if maxval != 255 {
            return Err(format!("unsupported maxval {maxval}"));
        }
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let len = width * height;
        let raster = bytes
            .get(pos..pos + len)
            .ok_or_else(|| format!("raster truncated: need {len} bytes"))?;
        let pixels = Grid::from_vec(height, width, raster.to_vec()).map_err(|e| e.to_string())?;
        Ok(GrayImage { pixels })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
        GrayImage::decode(&bytes).map_err(|msg| CliError::Format {
            path: path.to_path_buf(),
            msg,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.encode()).map_err(|e| CliError::io(path, e))
    }

    /// Each pixel replicated into a `scale x scale` block.
    pub fn upscale(&self, scale: usize) -> GrayImage {
        let (h, w) = self.pixels.dims();
        GrayImage::new(Grid::from_fn(h * scale, w * scale, |r, c| {
            self.pixels[(r / scale, c / scale)]
        }))
    }

    /// Pixels scaled to `[0, 1]`.
    pub fn unit(&self) -> Grid<f64> {
        self.pixels.map(|&p| p as f64 / 255.0)
    }
}

/// Skips whitespace and `#` comments, returns the next header token.
fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        match bytes.get(*pos)? {
            b'#' => {
                while *bytes.get(*pos)? != b'\n' {
                    *pos += 1;
                }
            }
            b if b.is_ascii_whitespace() => *pos += 1,
            _ => break,
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

/// Binary phase map: 255 where the cell tunneled.
pub fn phase_map_image(map: &Grid<bool>) -> GrayImage {
    GrayImage::new(map.map(|&b| if b { 255 } else { 0 }))
}

pub fn image_to_phase_map(img: &GrayImage) -> Grid<bool> {
    img.pixels.map(|&p| p >= 128)
}

/// Class `k` of `order` maps to `round(255 (k + 1) / order)`; unlocked
/// cells are 0.
pub fn class_map_image(classes: &Grid<Option<u32>>, order: u32) -> GrayImage {
    GrayImage::new(classes.map(|c| match c {
        Some(k) => ((255.0 * (*k + 1) as f64 / order as f64).round()) as u8,
        None => 0,
    }))
}

/// Maps `[-1, 1]` linearly onto `[0, 255]`, clamping outside.
pub fn signed_unit_image(values: &Grid<f64>) -> GrayImage {
    GrayImage::new(values.map(|&v| ((v.clamp(-1.0, 1.0) + 1.0) * 127.5).round() as u8))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_round_trip() {
        let img = GrayImage::new(Grid::from_fn(3, 5, |r, c| (r * 50 + c * 7) as u8));
        let bytes = img.encode();
        assert!(bytes.starts_with(b"P5\n5 3\n255\n"));
        assert_eq!(GrayImage::decode(&bytes).unwrap(), img);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 200]);
        let img = GrayImage::decode(&bytes).unwrap();
        assert_eq!(img.pixels.as_slice(), &[10, 200]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GrayImage::decode(b"P2\n1 1\n255\n0").is_err());
        assert!(GrayImage::decode(b"P5\n2 2\n255\n\x01").is_err());
        assert!(GrayImage::decode(b"P5\n1 1\n65535\n\x00\x00").is_err());
    }

    #[test]
    fn class_levels_spread_evenly() {
        let g = Grid::from_vec(1, 4, vec![None, Some(0), Some(1), Some(2)]).unwrap();
        assert_eq!(class_map_image(&g, 3).pixels.as_slice(), &[0, 85, 170, 255]);
    }

    #[test]
    fn upscale_replicates_blocks() {
        let img = GrayImage::new(Grid::from_vec(1, 2, vec![1, 2]).unwrap());
        let up = img.upscale(2);
        assert_eq!(up.pixels.as_slice(), &[1, 1, 2, 2, 1, 1, 2, 2]);
    }
}
