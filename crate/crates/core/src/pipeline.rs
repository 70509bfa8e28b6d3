//! Per-frame feature extraction and fixed-length window summaries.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::articulator::{self, articulator_window, OpennessConfig};
use crate::error::{Error, Result};
use crate::ingest::{crop_normalize, MouthLandmarks};
use crate::lip_geometry::{fit_contour, static_features, ContourConfig, StaticShapeFeatures};
use crate::lipprint::{self, frame_lines, lipprint_window, LineSegment, LipprintConfig};
use crate::raster::RgbImage;
use crate::texture::{self, flatten_raw, frame_glcm_features, TextureConfig};

pub const STATIC_DIM: usize = 8;

/// Feature blocks in vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    Static,
    Texture,
    Lipprint,
    Articulator,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::Static, Block::Texture, Block::Lipprint, Block::Articulator];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub length: usize,
    pub stride: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { length: 25, stride: 12 }
    }
}

impl WindowConfig {
    /// Start indices of every full window over `frames` frames.
    pub fn starts(&self, frames: usize) -> Vec<usize> {
        if frames < self.length {
            return Vec::new();
        }
        (0..=(frames - self.length)).step_by(self.stride).collect()
    }

    /// Frames needed for `windows` windows.
    pub fn frames_for(&self, windows: usize) -> usize {
        if windows == 0 {
            0
        } else {
            self.length + self.stride * (windows - 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Crop margin around the mouth box, as a fraction of its size.
    pub margin: f64,
    pub contour: ContourConfig,
    pub texture: TextureConfig,
    pub lipprint: LipprintConfig,
    pub openness: OpennessConfig,
    pub window: WindowConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            margin: 0.15,
            contour: ContourConfig::default(),
            texture: TextureConfig::default(),
            lipprint: LipprintConfig::default(),
            openness: OpennessConfig::default(),
            window: WindowConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn standard() -> Self {
        PipelineConfig::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(Error::InvalidConfig("pipeline.margin must be nonnegative".into()));
        }
        if self.window.length < 2 || self.window.stride == 0 {
            return Err(Error::InvalidConfig(
                "window.length must be >= 2 and window.stride >= 1".into(),
            ));
        }
        self.contour.validate()?;
        self.texture.validate()?;
        self.lipprint.validate()?;
        self.openness.validate()
    }
}

/// Everything a window needs from one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFeatures {
    /// Mouth landmarks in source pixels.
    pub mouth: MouthLandmarks,
    /// Mouth landmarks in ROI coordinates.
    pub roi_mouth: MouthLandmarks,
    pub shape: StaticShapeFeatures,
    pub texture_raw: Vec<f64>,
    pub lines: Vec<LineSegment>,
}

pub fn frame_features(mouth: &MouthLandmarks, image: &RgbImage, cfg: &PipelineConfig) -> Result<FrameFeatures> {
    let contour = fit_contour(mouth, &cfg.contour)?;
    let roi = crop_normalize(image, mouth, &contour, cfg.margin)?;
    let shape = static_features(&roi)?;
    let texture_raw = flatten_raw(&frame_glcm_features(&roi, &cfg.texture)?);
    let lines = frame_lines(&roi, &cfg.lipprint)?;
    Ok(FrameFeatures {
        mouth: *mouth,
        roi_mouth: roi.mouth,
        shape,
        texture_raw,
        lines,
    })
}

/// Area, perimeter, mean upper and lower thickness, curvature, symmetry,
/// luma of the mean color and its red chromaticity.
pub fn static_vector(s: &StaticShapeFeatures) -> [f64; STATIC_DIM] {
    let [r, g, b] = s.color_stats.mean;
    let total = r + g + b;
    [
        s.area_px as f64,
        s.perimeter_px,
        s.upper_thickness.mean,
        s.lower_thickness.mean,
        s.curvature_mean,
        s.symmetry,
        0.299 * r + 0.587 * g + 0.114 * b,
        if total > 0.0 { r / total } else { 0.0 },
    ]
}

/// Window features before texture reduction and normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawWindow {
    pub static_block: Vec<f64>,
    pub texture_raw: Vec<f64>,
    pub lipprint: Vec<f64>,
    pub articulator: Vec<f64>,
    pub present: [bool; 4],
}

pub const RAW_DIM: usize =
    STATIC_DIM + texture::RAW_DIM + lipprint::WINDOW_DIM + articulator::BLOCK_DIM;

impl RawWindow {
    /// Flat layout: static, raw texture, lip-print, articulator, then one 0/1 flag per block.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(RAW_DIM + 4);
        v.extend_from_slice(&self.static_block);
        v.extend_from_slice(&self.texture_raw);
        v.extend_from_slice(&self.lipprint);
        v.extend_from_slice(&self.articulator);
        v.extend(self.present.iter().map(|&p| p as u8 as f64));
        v
    }

    pub fn from_slice(v: &[f64]) -> Result<RawWindow> {
        if v.len() != RAW_DIM + 4 {
            return Err(Error::DimensionMismatch {
                expected: RAW_DIM + 4,
                found: v.len(),
            });
        }
        let mut at = 0;
        let mut take = |n: usize| {
            let s = v[at..at + n].to_vec();
            at += n;
            s
        };
        let static_block = take(STATIC_DIM);
        let texture_raw = take(texture::RAW_DIM);
        let lipprint = take(lipprint::WINDOW_DIM);
        let articulator = take(articulator::BLOCK_DIM);
        let flags = take(4);
        Ok(RawWindow {
            static_block,
            texture_raw,
            lipprint,
            articulator,
            present: [flags[0] != 0.0, flags[1] != 0.0, flags[2] != 0.0, flags[3] != 0.0],
        })
    }
}

fn mean_of<'a>(rows: impl Iterator<Item = &'a [f64]>, dim: usize) -> Vec<f64> {
    let mut sum = vec![0.0; dim];
    let mut n = 0usize;
    for r in rows {
        for (s, v) in sum.iter_mut().zip(r) {
            *s += v;
        }
        n += 1;
    }
    if n > 0 {
        sum.iter_mut().for_each(|s| *s /= n as f64);
    }
    sum
}

pub fn window_features(frames: &[FrameFeatures], cfg: &PipelineConfig) -> Result<RawWindow> {
    if frames.len() < 2 {
        return Err(Error::WindowTooShort {
            frames: frames.len(),
            needed: 2,
        });
    }
    let statics: Vec<[f64; STATIC_DIM]> = frames.iter().map(|f| static_vector(&f.shape)).collect();
    let static_block = mean_of(statics.iter().map(|s| &s[..]), STATIC_DIM);
    let texture_raw = mean_of(frames.iter().map(|f| &f.texture_raw[..]), texture::RAW_DIM);
    let lines: Vec<Vec<LineSegment>> = frames.iter().map(|f| f.lines.clone()).collect();
    let lp = lipprint_window(&lines, &cfg.lipprint.matching);
    let roi: Vec<MouthLandmarks> = frames.iter().map(|f| f.roi_mouth).collect();
    let src: Vec<MouthLandmarks> = frames.iter().map(|f| f.mouth).collect();
    let art = articulator_window(&roi, &src, &cfg.openness)?;
    Ok(RawWindow {
        static_block,
        texture_raw,
        lipprint: lp.values,
        articulator: art.values(),
        present: [true, true, lp.present, true],
    })
}

/// Slides the configured window over a clip's frame features.
pub fn clip_windows(frames: &[FrameFeatures], cfg: &PipelineConfig) -> Result<Vec<RawWindow>> {
    let starts = cfg.window.starts(frames.len());
    if starts.is_empty() {
        return Err(Error::WindowTooShort {
            frames: frames.len(),
            needed: cfg.window.length,
        });
    }
    starts
        .into_iter()
        .map(|s| window_features(&frames[s..s + cfg.window.length], cfg))
        .collect()
}
