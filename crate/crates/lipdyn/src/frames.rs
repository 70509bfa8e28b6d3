//! PNG frame IO.

use std::path::{Path, PathBuf};

use lipdyn_core::ingest::LandmarkFrame;
use lipdyn_core::raster::RgbImage;

use crate::error::{CliError, Result};

pub fn load_rgb(path: &Path) -> Result<RgbImage> {
    let img = image::open(path)
        .map_err(|e| CliError::format(path, e.to_string()))?
        .into_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let px = img.as_raw().chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Ok(RgbImage::from_vec(w, h, px))
}

pub fn save_rgb(path: &Path, img: &RgbImage) -> Result<()> {
    let flat: Vec<u8> = img.data().iter().flatten().copied().collect();
    image::save_buffer(
        path,
        &flat,
        img.width() as u32,
        img.height() as u32,
        image::ExtendedColorType::Rgb8,
    )
    .map_err(|e| CliError::format(path, e.to_string()))
}

/// The frame's `img` relative to `dir`, or `dir/<frame index, 5 digits>.png`.
pub fn frame_path(dir: &Path, frame: &LandmarkFrame) -> PathBuf {
    match &frame.image_ref {
        Some(r) => dir.join(r),
        None => dir.join(format!("{:05}.png", frame.frame_index)),
    }
}
