//! Lip-print grooves: edge enhancement, line segments, and their motion
//! between consecutive frames.

pub mod bilateral;
pub mod canny;
pub mod clahe;
pub mod hough;
pub mod motion;
pub mod segments;

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use bilateral::bilateral;
pub use canny::canny;
pub use clahe::clahe;
pub use hough::{hough_segments, HoughConfig};
pub use motion::{
    match_motion, pair_stats, trajectory_stats, MatchConfig, MotionVector, MotionVectorSet,
    PairStats, TrajectoryStats, MAX_VECTORS,
};
pub use segments::{filter_lines, link_segments, FilterConfig, LineSegment, LinkConfig};

use crate::error::{Error, Result};
use crate::ingest::LipRoi;
use crate::raster::{GrayImage, Mask};
use crate::texture::{split_regions, RegionTiling};

/// Sixteen slot-averaged vector components plus five window statistics.
pub const WINDOW_DIM: usize = 2 * MAX_VECTORS + 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LipprintConfig {
    pub clahe_clip: f64,
    pub clahe_tiles: usize,
    pub canny_low: f64,
    pub canny_high: f64,
    pub bilateral_diameter: usize,
    pub bilateral_sigma_color: f64,
    pub bilateral_sigma_space: f64,
    /// Smoothed edge values above this stay edges.
    pub edge_threshold: u8,
    pub hough: HoughConfig,
    pub link: LinkConfig,
    pub filter: FilterConfig,
    pub matching: MatchConfig,
}

impl Default for LipprintConfig {
    fn default() -> Self {
        LipprintConfig {
            clahe_clip: 2.0,
            clahe_tiles: 8,
            canny_low: 50.0,
            canny_high: 150.0,
            bilateral_diameter: 5,
            bilateral_sigma_color: 75.0,
            bilateral_sigma_space: 75.0,
            edge_threshold: 127,
            hough: HoughConfig::default(),
            link: LinkConfig::default(),
            filter: FilterConfig::default(),
            matching: MatchConfig::default(),
        }
    }
}

impl LipprintConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.clahe_tiles == 0 || self.bilateral_diameter == 0 {
            return bad("lipprint tile count and bilateral diameter must be positive");
        }
        if !(self.canny_low >= 0.0 && self.canny_low <= self.canny_high) {
            return bad("lipprint canny thresholds must satisfy 0 <= low <= high");
        }
        if !(self.hough.rho > 0.0 && self.hough.theta_deg > 0.0 && self.hough.threshold > 0) {
            return bad("lipprint hough resolution and threshold must be positive");
        }
        if !(self.matching.max_distance >= 0.0) {
            return bad("lipprint match gate must be nonnegative");
        }
        Ok(())
    }
}

/// Binary (0/255) groove map restricted to the lip mask.
pub fn preprocess_lipprint(roi: &LipRoi, cfg: &LipprintConfig) -> Result<GrayImage> {
    if roi.mask.count_set() == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(enhance_edges(&roi.gray, &roi.mask, cfg))
}

pub fn enhance_edges(gray: &GrayImage, mask: &Mask, cfg: &LipprintConfig) -> GrayImage {
    let eq = clahe(gray, cfg.clahe_clip, cfg.clahe_tiles, cfg.clahe_tiles);
    let edges = canny(&eq, cfg.canny_low, cfg.canny_high);
    let smooth = bilateral(
        &edges,
        cfg.bilateral_diameter,
        cfg.bilateral_sigma_color,
        cfg.bilateral_sigma_space,
    );
    GrayImage::from_fn(gray.width(), gray.height(), |x, y| {
        if mask.get(x, y) != 0 && smooth.get(x, y) > cfg.edge_threshold {
            255
        } else {
            0
        }
    })
}

/// Hough segments labelled by the region holding their center.
pub fn detect_lines(edges: &GrayImage, tiling: &RegionTiling, cfg: &HoughConfig) -> Vec<LineSegment> {
    hough_segments(edges, cfg)
        .into_iter()
        .map(|(a, b)| {
            let mut s = LineSegment::new(a, b, crate::texture::RegionLabel::UL);
            s.region = tiling.label_of(s.center());
            s
        })
        .collect()
}

/// Full per-frame chain: enhance, detect, link, filter.
pub fn frame_lines(roi: &LipRoi, cfg: &LipprintConfig) -> Result<Vec<LineSegment>> {
    let edges = preprocess_lipprint(roi, cfg)?;
    let tiling = split_regions(roi)?.tiling();
    let lines = detect_lines(&edges, &tiling, &cfg.hough);
    let kept = filter_lines(&link_segments(&lines, &cfg.link), &cfg.filter);
    assert!(kept.iter().all(|l| cfg.filter.accepts(l)));
    Ok(kept)
}

/// Window summary of lip-print motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipprintWindow {
    pub pairs: Vec<MotionVectorSet>,
    pub trajectory: TrajectoryStats,
    /// `WINDOW_DIM` values; all zero when `present` is false.
    pub values: Vec<f64>,
    /// False when the grooves never moved across the window.
    pub present: bool,
}

/// Matches every adjacent frame pair and condenses the result.
///
/// Slots 0..6 hold each region's primary vector and slots 6..8 the first two
/// padding vectors; each slot is averaged over the pairs that filled it. The
/// tail is mean dx, mean dy, mean magnitude, trajectory length, curvature.
pub fn lipprint_window(frames: &[Vec<LineSegment>], cfg: &MatchConfig) -> LipprintWindow {
    let pairs: Vec<MotionVectorSet> = frames
        .windows(2)
        .map(|w| match_motion(&w[0], &w[1], cfg))
        .collect();
    let stats: Vec<Option<PairStats>> = pairs.iter().map(|p| p.stats).collect();
    let trajectory = trajectory_stats(&stats);
    let mut values = alloc::vec![0.0; WINDOW_DIM];
    let present = trajectory.length > 0.0;
    if present {
        let mut sums = [(0.0, 0.0, 0usize); MAX_VECTORS];
        for p in &pairs {
            let mut pad = 6;
            for v in &p.vectors {
                let slot = if v.primary {
                    v.region.index()
                } else if pad < MAX_VECTORS {
                    pad += 1;
                    pad - 1
                } else {
                    continue;
                };
                sums[slot].0 += v.dx;
                sums[slot].1 += v.dy;
                sums[slot].2 += 1;
            }
        }
        for (k, (sx, sy, n)) in sums.iter().enumerate() {
            if *n > 0 {
                values[2 * k] = sx / *n as f64;
                values[2 * k + 1] = sy / *n as f64;
            }
        }
        let present_stats: Vec<&PairStats> = stats.iter().flatten().collect();
        let n = present_stats.len() as f64;
        let base = 2 * MAX_VECTORS;
        values[base] = present_stats.iter().map(|s| s.mean_dx).sum::<f64>() / n;
        values[base + 1] = present_stats.iter().map(|s| s.mean_dy).sum::<f64>() / n;
        values[base + 2] = present_stats.iter().map(|s| s.mean_magnitude).sum::<f64>() / n;
        values[base + 3] = trajectory.length;
        values[base + 4] = trajectory.curvature;
    }
    LipprintWindow {
        pairs,
        trajectory,
        values,
        present,
    }
}
