//! Landmark frames, mouth subset extraction and lip ROI normalization.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{BoundingBox, Point};
use crate::lip_geometry::{rasterize_mask, LipContour};
use crate::raster::{GrayImage, Mask, RgbImage};

pub const FACE_POINTS: usize = 68;
pub const MOUTH_POINTS: usize = 20;
/// First mouth landmark in the 68-point layout.
pub const MOUTH_OFFSET: usize = 48;

pub const ROI_WIDTH: usize = 250;
pub const ROI_HEIGHT: usize = 110;
pub const ROI_PIXELS: usize = ROI_WIDTH * ROI_HEIGHT;

/// One video frame's 68 facial landmarks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkFrame {
    pub frame_index: u64,
    pub timestamp_ms: f64,
    points: Vec<Point>,
    pub image_ref: Option<String>,
}

impl LandmarkFrame {
    pub fn new(
        frame_index: u64,
        timestamp_ms: f64,
        points: Vec<Point>,
        image_ref: Option<String>,
    ) -> core::result::Result<Self, String> {
        if points.len() != FACE_POINTS {
            return Err(alloc::format!(
                "expected {FACE_POINTS} points, found {}",
                points.len()
            ));
        }
        if let Some((i, _)) = points
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || p.x < 0.0 || p.y < 0.0)
        {
            return Err(alloc::format!("point {i} is negative or not finite"));
        }
        if !(timestamp_ms.is_finite() && timestamp_ms >= 0.0) {
            return Err("timestamp must be finite and nonnegative".to_string());
        }
        Ok(LandmarkFrame {
            frame_index,
            timestamp_ms,
            points,
            image_ref,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

/// Sorts `(source line, frame)` pairs by frame index and rejects duplicate indices.
pub fn order_frames(frames: Vec<(usize, LandmarkFrame)>) -> Result<Vec<LandmarkFrame>> {
    let mut frames = frames;
    frames.sort_by_key(|(line, f)| (f.frame_index, *line));
    for w in frames.windows(2) {
        if w[0].1.frame_index == w[1].1.frame_index {
            return Err(Error::MalformedRecord {
                line: w[1].0,
                reason: alloc::format!("duplicate frame index {}", w[1].1.frame_index),
            });
        }
    }
    Ok(frames.into_iter().map(|(_, f)| f).collect())
}

/// Landmarks 48..=67 of the 68-point layout; index `k` here is face point `48 + k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MouthLandmarks {
    pub points: [Point; MOUTH_POINTS],
}

impl MouthLandmarks {
    pub fn bounding_box(&self) -> BoundingBox {
        BoundingBox::of_points(&self.points).expect("20 points")
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> MouthLandmarks {
        MouthLandmarks {
            points: self.points.map(f),
        }
    }

    /// Left and right outer mouth corners (face points 48 and 54).
    pub fn corners(&self) -> (Point, Point) {
        (self.points[0], self.points[6])
    }
}

pub fn extract_mouth(frame: &LandmarkFrame) -> MouthLandmarks {
    let mut points = [Point::default(); MOUTH_POINTS];
    points.copy_from_slice(&frame.points[MOUTH_OFFSET..MOUTH_OFFSET + MOUTH_POINTS]);
    MouthLandmarks { points }
}

/// Axis-aligned scale + offset from source pixels to ROI pixels.
///
/// The crop rectangle `[x0, x1]` maps onto `[-0.5, W - 0.5]` so that the crop
/// edges coincide with the outer edges of the ROI's border pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoiTransform {
    pub crop: BoundingBox,
    pub scale_x: f64,
    pub scale_y: f64,
}

impl RoiTransform {
    pub fn from_crop(crop: BoundingBox) -> Self {
        RoiTransform {
            crop,
            scale_x: ROI_WIDTH as f64 / crop.width(),
            scale_y: ROI_HEIGHT as f64 / crop.height(),
        }
    }

    pub fn to_roi(&self, p: Point) -> Point {
        Point::new(
            (p.x - self.crop.min.x) * self.scale_x - 0.5,
            (p.y - self.crop.min.y) * self.scale_y - 0.5,
        )
    }

    pub fn to_source(&self, p: Point) -> Point {
        Point::new(
            (p.x + 0.5) / self.scale_x + self.crop.min.x,
            (p.y + 0.5) / self.scale_y + self.crop.min.y,
        )
    }
}

/// Crop rectangle for a mouth: its bounding box grown by `margin` on every side.
pub fn crop_rect(mouth: &MouthLandmarks, margin: f64) -> Result<BoundingBox> {
    let b = mouth.bounding_box();
    if !(b.width() > 0.0 && b.height() > 0.0) {
        return Err(Error::DegenerateBox);
    }
    Ok(b.expand(margin))
}

/// Normalized 250x110 lip region.
#[derive(Debug, Clone, PartialEq)]
pub struct LipRoi {
    pub gray: GrayImage,
    pub mask: Mask,
    pub color: RgbImage,
    pub transform: RoiTransform,
    /// Mouth landmarks in ROI coordinates.
    pub mouth: MouthLandmarks,
}

impl LipRoi {
    /// Corner midline `y` at column `x` (line through landmarks 48 and 54).
    pub fn midline_y(&self, x: f64) -> f64 {
        let (l, r) = self.mouth.corners();
        if (r.x - l.x).abs() < 1e-12 {
            return 0.5 * (l.y + r.y);
        }
        l.y + (x - l.x) * (r.y - l.y) / (r.x - l.x)
    }
}

/// Crops the mouth area, resamples it to 250x110 and rasterizes the contour mask.
///
/// Gray and color use bilinear sampling with clamped borders; the mask is drawn
/// directly from the contour in ROI coordinates, so it stays binary.
pub fn crop_normalize(
    image: &RgbImage,
    mouth: &MouthLandmarks,
    contour: &LipContour,
    margin: f64,
) -> Result<LipRoi> {
    let crop = crop_rect(mouth, margin)?;
    let transform = RoiTransform::from_crop(crop);
    let color = RgbImage::from_fn(ROI_WIDTH, ROI_HEIGHT, |x, y| {
        let src = transform.to_source(Point::new(x as f64, y as f64));
        sample_rgb(image, src.x, src.y)
    });
    let gray = color.to_gray();
    let roi_contour = contour.map_axes(
        transform.scale_x,
        -crop.min.x * transform.scale_x - 0.5,
        transform.scale_y,
        -crop.min.y * transform.scale_y - 0.5,
    );
    let mask = rasterize_mask(&roi_contour, ROI_WIDTH, ROI_HEIGHT);
    Ok(LipRoi {
        gray,
        mask,
        color,
        transform,
        mouth: mouth.map(|p| transform.to_roi(p)),
    })
}

fn sample_rgb(image: &RgbImage, x: f64, y: f64) -> [u8; 3] {
    let w = image.width();
    let h = image.height();
    let x = x.clamp(0.0, (w - 1) as f64);
    let y = y.clamp(0.0, (h - 1) as f64);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let (a, b, c, d) = (
        image.get(x0, y0),
        image.get(x1, y0),
        image.get(x0, y1),
        image.get(x1, y1),
    );
    let mut out = [0u8; 3];
    for ch in 0..3 {
        let top = a[ch] as f64 * (1.0 - fx) + b[ch] as f64 * fx;
        let bottom = c[ch] as f64 * (1.0 - fx) + d[ch] as f64 * fx;
        let v = top * (1.0 - fy) + bottom * fy;
        out[ch] = (v + 0.5).clamp(0.0, 255.0) as u8;
    }
    out
}
