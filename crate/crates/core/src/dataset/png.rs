use std::path::Path;

use image::{GrayImage, Luma};

use crate::error::{Error, Result};
use crate::spectroscopy::SpectroscopyMap;

/// Linear 8-bit grayscale rendering: min(P) → 0, max(P) → 255 (values are
/// floored, so only pixels equal to the maximum reach 255). A constant map
/// renders black. Image row 0 is the shortest pulse, column 0 the lowest
/// drive frequency.
pub fn render_gray(map: &SpectroscopyMap) -> GrayImage {
    let (lo, hi) = map.min_max();
    let span = hi - lo;
    GrayImage::from_fn(map.cols() as u32, map.rows() as u32, |x, y| {
        let v = map.get(y as usize, x as usize);
        let level = if span > 0.0 { (255.0 * (v - lo) / span).floor().clamp(0.0, 255.0) as u8 } else { 0 };
        Luma([level])
    })
}

pub fn export_png(map: &SpectroscopyMap, path: &Path) -> Result<()> {
    render_gray(map)
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))
}
