//! Landmark trajectories, their pairwise correlations, and mouth openness.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::ingest::{MouthLandmarks, MOUTH_POINTS};
use crate::lip_geometry::{fit_contour, Arc, ContourConfig};

pub const UPPER_TRIANGLE: usize = MOUTH_POINTS * (MOUTH_POINTS - 1) / 2;
pub const BLOCK_DIM: usize = 2 * UPPER_TRIANGLE + 3;

/// Landmark-by-frame coordinate matrices, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMatrix {
    pub frames: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl TrajectoryMatrix {
    pub fn x_row(&self, i: usize) -> &[f64] {
        &self.x[i * self.frames..(i + 1) * self.frames]
    }

    pub fn y_row(&self, i: usize) -> &[f64] {
        &self.y[i * self.frames..(i + 1) * self.frames]
    }
}

pub fn build_trajectories(frames: &[MouthLandmarks]) -> Result<TrajectoryMatrix> {
    let n = frames.len();
    if n < 2 {
        return Err(Error::WindowTooShort { frames: n, needed: 2 });
    }
    let mut x = vec![0.0; MOUTH_POINTS * n];
    let mut y = vec![0.0; MOUTH_POINTS * n];
    for (k, f) in frames.iter().enumerate() {
        for (i, p) in f.points.iter().enumerate() {
            x[i * n + k] = p.x;
            y[i * n + k] = p.y;
        }
    }
    Ok(TrajectoryMatrix { frames: n, x, y })
}

/// Square correlation matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub size: usize,
    pub r: Vec<f64>,
}

impl Correlation {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.size + j]
    }

    /// Strict upper triangle, row by row.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.size * (self.size - 1) / 2);
        for i in 0..self.size {
            for j in i + 1..self.size {
                out.push(self.at(i, j));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFeatures {
    pub rx: Correlation,
    pub ry: Correlation,
}

pub fn correlation_matrix(traj: &TrajectoryMatrix) -> CorrelationFeatures {
    CorrelationFeatures {
        rx: pearson_rows(&traj.x, MOUTH_POINTS, traj.frames),
        ry: pearson_rows(&traj.y, MOUTH_POINTS, traj.frames),
    }
}

/// Pearson correlation between every pair of rows; a constant row correlates
/// 0 with everything, itself included.
pub fn pearson_rows(data: &[f64], rows: usize, cols: usize) -> Correlation {
    let mut centered = vec![0.0; rows * cols];
    let mut norm = vec![0.0; rows];
    for i in 0..rows {
        let row = &data[i * cols..(i + 1) * cols];
        if row.iter().all(|&v| v == row[0]) {
            continue;
        }
        let mean = row.iter().sum::<f64>() / cols as f64;
        let c = &mut centered[i * cols..(i + 1) * cols];
        for (o, v) in c.iter_mut().zip(row) {
            *o = v - mean;
        }
        norm[i] = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let mut r = vec![0.0; rows * rows];
    for i in 0..rows {
        if norm[i] == 0.0 {
            continue;
        }
        r[i * rows + i] = 1.0;
        let a = &centered[i * cols..(i + 1) * cols];
        for j in i + 1..rows {
            if norm[j] == 0.0 {
                continue;
            }
            let b = &centered[j * cols..(j + 1) * cols];
            let dot: f64 = a.iter().zip(b).map(|(u, v)| u * v).sum();
            let v = dot / (norm[i] * norm[j]);
            r[i * rows + j] = v;
            r[j * rows + i] = v;
        }
    }
    Correlation { size: rows, r }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OpeningLevel {
    Small,
    Medium,
    Large,
}

impl OpeningLevel {
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OpennessConfig {
    pub small_below: f64,
    pub medium_below: f64,
}

impl Default for OpennessConfig {
    fn default() -> Self {
        OpennessConfig {
            small_below: 0.33,
            medium_below: 0.66,
        }
    }
}

impl OpennessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.small_below && self.small_below < self.medium_below && self.medium_below < 1.0) {
            return Err(Error::InvalidConfig(
                "openness thresholds must satisfy 0 < small < medium < 1".to_string(),
            ));
        }
        Ok(())
    }

    pub fn level(&self, normalized: f64) -> OpeningLevel {
        if normalized < self.small_below {
            OpeningLevel::Small
        } else if normalized < self.medium_below {
            OpeningLevel::Medium
        } else {
            OpeningLevel::Large
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpennessSeries {
    pub height: Vec<f64>,
    pub level: Vec<OpeningLevel>,
    /// Fractions of small, medium, large frames.
    pub histogram: [f64; 3],
}

/// Heights below this count as a closed mouth when normalizing.
const CLOSED: f64 = 1e-9;

pub fn openness(frames: &[MouthLandmarks], cfg: &OpennessConfig) -> Result<OpennessSeries> {
    if frames.is_empty() {
        return Err(Error::EmptyInput);
    }
    let height: Vec<f64> = frames.iter().map(inner_height).collect();
    Ok(classify_heights(height, cfg))
}

pub fn classify_heights(height: Vec<f64>, cfg: &OpennessConfig) -> OpennessSeries {
    let max = height.iter().cloned().fold(0.0, f64::max);
    let level: Vec<OpeningLevel> = height
        .iter()
        .map(|&h| cfg.level(if max > CLOSED { h / max } else { 0.0 }))
        .collect();
    let mut histogram = [0.0; 3];
    for l in &level {
        histogram[l.index()] += 1.0;
    }
    let n = level.len().max(1) as f64;
    histogram.iter_mut().for_each(|v| *v /= n);
    OpennessSeries {
        height,
        level,
        histogram,
    }
}

/// Largest vertical gap between the inner upper and inner lower lip curves.
pub fn inner_height(mouth: &MouthLandmarks) -> f64 {
    let (upper, lower) = match fit_contour(mouth, &ContourConfig::default()) {
        Ok(c) => (c.arc_polyline(Arc::UpperInner), c.arc_polyline(Arc::LowerInner)),
        Err(_) => {
            let pick = |ids: &[usize]| ids.iter().map(|&i| mouth.points[i]).collect::<Vec<_>>();
            (pick(Arc::UpperInner.landmarks()), pick(Arc::LowerInner.landmarks()))
        }
    };
    let mut xs: Vec<f64> = upper.iter().chain(&lower).map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    let mut best = 0.0f64;
    for x in xs {
        let (Some(u), Some(l)) = (crossing(&upper, x, f64::max), crossing(&lower, x, f64::min)) else {
            continue;
        };
        best = best.max(l - u);
    }
    best
}

/// `y` where the polyline crosses column `x`, reduced over all crossings.
fn crossing(poly: &[Point], x: f64, pick: fn(f64, f64) -> f64) -> Option<f64> {
    let mut out: Option<f64> = None;
    for w in poly.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (lo, hi) = if a.x <= b.x { (a, b) } else { (b, a) };
        if x < lo.x || x > hi.x {
            continue;
        }
        let y = if hi.x - lo.x < 1e-12 {
            pick(lo.y, hi.y)
        } else {
            lo.y + (x - lo.x) / (hi.x - lo.x) * (hi.y - lo.y)
        };
        out = Some(out.map_or(y, |o| pick(o, y)));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhonemeEntry {
    pub symbol: &'static str,
    pub ipa: &'static str,
    pub level: OpeningLevel,
}

const PHONEME_TABLE: &str = include_str!("../data/phonemes.tsv");

/// Vowel categories, one entry per line of the bundled table.
pub fn phoneme_table() -> Vec<PhonemeEntry> {
    PHONEME_TABLE
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut cols = l.split('\t');
            let symbol = cols.next().expect("symbol column");
            let level = match cols.next() {
                Some("small") => OpeningLevel::Small,
                Some("medium") => OpeningLevel::Medium,
                Some("large") => OpeningLevel::Large,
                other => panic!("bad opening level {other:?} in phoneme table"),
            };
            let ipa = cols.next().unwrap_or("");
            PhonemeEntry { symbol, ipa, level }
        })
        .collect()
}

/// Accepts the ASCII transcription or IPA form, with or without slashes.
pub fn phoneme_category(phoneme: &str) -> Result<OpeningLevel> {
    let key = phoneme.trim().trim_matches('/');
    phoneme_table()
        .into_iter()
        .find(|e| e.symbol == key || (!e.ipa.is_empty() && e.ipa == key))
        .map(|e| e.level)
        .ok_or_else(|| Error::UnknownPhoneme(phoneme.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticulatorWindow {
    pub correlation: CorrelationFeatures,
    pub openness: OpennessSeries,
}

impl ArticulatorWindow {
    /// Rx and Ry upper triangles followed by the level histogram.
    pub fn values(&self) -> Vec<f64> {
        let mut v = self.correlation.rx.upper_triangle();
        v.extend(self.correlation.ry.upper_triangle());
        v.extend_from_slice(&self.openness.histogram);
        v
    }
}

/// `roi_frames` feed the correlations, `source_frames` the openness heights.
pub fn articulator_window(
    roi_frames: &[MouthLandmarks],
    source_frames: &[MouthLandmarks],
    cfg: &OpennessConfig,
) -> Result<ArticulatorWindow> {
    let traj = build_trajectories(roi_frames)?;
    Ok(ArticulatorWindow {
        correlation: correlation_matrix(&traj),
        openness: openness(source_frames, cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mouth(f: impl Fn(usize) -> Point) -> MouthLandmarks {
        MouthLandmarks {
            points: core::array::from_fn(f),
        }
    }

    /// Ellipse-ish outer loop with an inner opening of half-height `open`.
    fn open_mouth(open: f64) -> MouthLandmarks {
        mouth(|i| {
            if i < 12 {
                let t = core::f64::consts::PI * i as f64 / 6.0;
                Point::new(100.0 - 40.0 * t.cos(), 50.0 - 20.0 * t.sin())
            } else if i <= 16 {
                let t = core::f64::consts::PI * (i - 12) as f64 / 4.0;
                Point::new(100.0 - 25.0 * t.cos(), 50.0 - open * t.sin())
            } else {
                let t = core::f64::consts::PI * (i - 16) as f64 / 4.0;
                Point::new(100.0 + 25.0 * t.cos(), 50.0 + open * t.sin())
            }
        })
    }

    #[test]
    fn trajectory_layout() {
        let a = mouth(|i| if i == 0 { Point::new(1.0, 2.0) } else { Point::new(0.0, 0.0) });
        let b = mouth(|i| if i == 0 { Point::new(3.0, 4.0) } else { Point::new(0.0, 0.0) });
        let t = build_trajectories(&[a, b]).unwrap();
        assert_eq!(t.x_row(0), &[1.0, 3.0]);
        assert_eq!(t.y_row(0), &[2.0, 4.0]);
        assert_eq!(build_trajectories(&[a]), Err(Error::WindowTooShort { frames: 1, needed: 2 }));
        let still = build_trajectories(&vec![a; 30]).unwrap();
        assert!(still.x_row(0).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn self_and_anti_correlation() {
        let data = [1.0, 2.0, 4.0, 3.0, -1.0, -2.0, -4.0, -3.0, 5.0, 5.0, 5.0, 5.0];
        let c = pearson_rows(&data, 3, 4);
        assert!((c.at(0, 0) - 1.0).abs() < 1e-12);
        assert!((c.at(0, 1) + 1.0).abs() < 1e-12);
        assert_eq!((c.at(2, 2), c.at(0, 2), c.at(2, 1)), (0.0, 0.0, 0.0));
    }

    #[test]
    fn constant_rows_with_rounding_means_are_detected() {
        let c = pearson_rows(&[0.1, 0.1, 0.1, 0.3, 0.2, 0.1], 2, 3);
        assert_eq!(c.r, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn openness_levels() {
        let s = classify_heights(vec![0.0, 5.0, 10.0], &OpennessConfig::default());
        assert_eq!(s.level, vec![OpeningLevel::Small, OpeningLevel::Medium, OpeningLevel::Large]);
        let s = classify_heights(vec![0.0; 4], &OpennessConfig::default());
        assert_eq!(s.histogram, [1.0, 0.0, 0.0]);
        let s = classify_heights(vec![3.0; 4], &OpennessConfig::default());
        assert_eq!(s.histogram, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn inner_height_of_open_and_closed_mouths() {
        assert!(inner_height(&open_mouth(0.0)).abs() < 1e-9);
        let h = inner_height(&open_mouth(8.0));
        // the fitted arcs bulge slightly past the apex landmarks
        assert!((16.0..17.5).contains(&h), "{h}");
        let frames = [open_mouth(0.0), open_mouth(4.0), open_mouth(8.0)];
        let s = openness(&frames, &OpennessConfig::default()).unwrap();
        assert_eq!(s.level, vec![OpeningLevel::Small, OpeningLevel::Medium, OpeningLevel::Large]);
    }

    #[test]
    fn phoneme_table_contents() {
        let t = phoneme_table();
        assert_eq!(t.len(), 20);
        let count = |l| t.iter().filter(|e| e.level == l).count();
        assert_eq!((count(OpeningLevel::Small), count(OpeningLevel::Medium), count(OpeningLevel::Large)), (6, 9, 5));
        assert_eq!(phoneme_category("/A:/"), Ok(OpeningLevel::Large));
        assert_eq!(phoneme_category("i:"), Ok(OpeningLevel::Small));
        assert_eq!(phoneme_category("@"), Ok(OpeningLevel::Medium));
        assert_eq!(phoneme_category("ɑː"), Ok(OpeningLevel::Large));
        assert!(matches!(phoneme_category("zz"), Err(Error::UnknownPhoneme(_))));
    }

    #[test]
    fn block_size() {
        assert_eq!(UPPER_TRIANGLE, 190);
        assert_eq!(BLOCK_DIM, 383);
        let frames: Vec<_> = (0..6).map(|k| open_mouth(k as f64)).collect();
        let w = articulator_window(&frames, &frames, &OpennessConfig::default()).unwrap();
        assert_eq!(w.values().len(), BLOCK_DIM);
    }
}
