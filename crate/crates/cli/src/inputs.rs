//! Input patterns and their mapping onto cell bias and initial charge.

use tplcnn_core::{Error, Grid};

use crate::pgm::GrayImage;

/// Pixel `p` maps to `v_lo + p/255 (v_hi - v_lo)`.
pub fn bias_from_image(img: &GrayImage, v_lo: f64, v_hi: f64) -> Result<Grid<f64>, Error> {
    if !(v_lo <= v_hi) {
        return Err(Error::InvalidParameter(format!("v_lo {v_lo} must not exceed v_hi {v_hi}")));
    }
    Ok(img
        .pixels
        .map(|&p| v_lo + p as f64 / 255.0 * (v_hi - v_lo)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Columns,
}

/// Linear ramp from `q_min` to `q_max` along `axis`, endpoints exact; a
/// single-cell extent takes `q_min`.
pub fn charge_gradient_init(
    height: usize,
    width: usize,
    q_min: f64,
    q_max: f64,
    axis: Axis,
) -> Result<Grid<f64>, Error> {
    if !(q_min <= q_max) {
        return Err(Error::InvalidParameter(format!("q_min {q_min} must not exceed q_max {q_max}")));
    }
    let extent = match axis {
        Axis::Rows => height,
        Axis::Columns => width,
    };
    let at = |i: usize| {
        if extent <= 1 || i == 0 {
            q_min
        } else if i + 1 == extent {
            q_max
        } else {
            q_min + (q_max - q_min) * i as f64 / (extent - 1) as f64
        }
    };
    Ok(Grid::from_fn(height, width, |r, c| match axis {
        Axis::Rows => at(r),
        Axis::Columns => at(c),
    }))
}

/// 255 inside the axis-aligned rectangle, 0 elsewhere.
pub fn rectangle(
    height: usize,
    width: usize,
    top: usize,
    left: usize,
    rect_height: usize,
    rect_width: usize,
) -> GrayImage {
    GrayImage::new(Grid::from_fn(height, width, |r, c| {
        let inside = r >= top && r < top + rect_height && c >= left && c < left + rect_width;
        if inside {
            255
        } else {
            0
        }
    }))
}

/// Centred `inner x inner` square at 255 on a 0 background.
pub fn square_in_square(height: usize, width: usize, inner: usize) -> GrayImage {
    let top = height.saturating_sub(inner) / 2;
    let left = width.saturating_sub(inner) / 2;
    rectangle(height, width, top, left, inner, inner)
}

/// Horizontal ramp from 0 to `ramp_max` (in grey levels) with a disk of
/// value 255 centred at `(blob_row, blob_col)`.
pub fn ramp_blob(
    height: usize,
    width: usize,
    ramp_max: u8,
    blob_row: f64,
    blob_col: f64,
    blob_radius: f64,
) -> GrayImage {
    GrayImage::new(Grid::from_fn(height, width, |r, c| {
        let (dr, dc) = (r as f64 - blob_row, c as f64 - blob_col);
        if dr * dr + dc * dc <= blob_radius * blob_radius {
            255
        } else if width <= 1 {
            0
        } else {
            (ramp_max as f64 * c as f64 / (width - 1) as f64).round() as u8
        }
    }))
}
