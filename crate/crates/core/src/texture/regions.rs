#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Rect};
use crate::ingest::LipRoi;
use crate::raster::Mask;

/// Upper/lower crossed with left/middle/right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    UL,
    UM,
    UR,
    LL,
    LM,
    LR,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 6] = [
        RegionLabel::UL,
        RegionLabel::UM,
        RegionLabel::UR,
        RegionLabel::LL,
        RegionLabel::LM,
        RegionLabel::LR,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["UL", "UM", "UR", "LL", "LM", "LR"][self.index()]
    }
}

/// The six rectangles without pixel data; enough to label points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionTiling {
    pub rects: [Rect; 6],
}

impl RegionTiling {
    /// Region containing the pixel nearest to `p`; points outside every
    /// rectangle go to the closest one.
    pub fn label_of(&self, p: Point) -> RegionLabel {
        let mut best = (f64::INFINITY, RegionLabel::UL);
        for label in RegionLabel::ALL {
            let r = self.rects[label.index()];
            if r.w == 0 || r.h == 0 {
                continue;
            }
            let x0 = r.x as f64 - 0.5;
            let x1 = (r.x + r.w) as f64 - 0.5;
            let y0 = r.y as f64 - 0.5;
            let y1 = (r.y + r.h) as f64 - 0.5;
            let dx = (x0 - p.x).max(0.0).max(p.x - x1);
            let dy = (y0 - p.y).max(0.0).max(p.y - y1);
            let d = dx * dx + dy * dy;
            if d < best.0 {
                best = (d, label);
            }
        }
        best.1
    }
}

/// One rectangle plus the mask pixels inside it that belong to the lip.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub label: RegionLabel,
    pub rect: Rect,
    /// Row-major over `rect`; `false` pixels are ignored.
    pub valid: Vec<bool>,
}

impl Region {
    /// Whole `w x h` raster, every pixel valid.
    pub fn full(width: usize, height: usize) -> Self {
        Region {
            label: RegionLabel::UL,
            rect: Rect {
                x: 0,
                y: 0,
                w: width,
                h: height,
            },
            valid: alloc::vec![true; width * height],
        }
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.rect.contains(x, y) && self.valid[(y - self.rect.y) * self.rect.w + (x - self.rect.x)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SixRegions {
    pub regions: Vec<Region>,
}

impl SixRegions {
    pub fn tiling(&self) -> RegionTiling {
        let mut rects = [Rect::default(); 6];
        for r in &self.regions {
            rects[r.label.index()] = r.rect;
        }
        RegionTiling { rects }
    }
}

pub fn split_regions(roi: &LipRoi) -> Result<SixRegions> {
    let (l, r) = roi.mouth.corners();
    let cx = 0.5 * (l.x + r.x);
    split_mask(&roi.mask, roi.midline_y(cx))
}

/// Tiles the mask bounding box: rows above `split_y` form the upper half, and
/// three equal-width column bands (leftmost takes the remainder) split each half.
pub fn split_mask(mask: &Mask, split_y: f64) -> Result<SixRegions> {
    let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) != 0 {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    if x0 == usize::MAX {
        return Err(Error::EmptyMask);
    }
    let width = x1 - x0 + 1;
    let height = y1 - y0 + 1;
    // first lower row; kept inside the box so both halves have rows when height >= 2
    let split = if split_y.is_finite() {
        split_y.ceil().clamp(y0 as f64, (y1 + 1) as f64) as usize
    } else {
        y0 + height / 2
    };
    let split = if height >= 2 {
        split.clamp(y0 + 1, y1)
    } else {
        split
    };
    let base = width / 3;
    let widths = [base + width % 3, base, base];
    let starts = [x0, x0 + widths[0], x0 + widths[0] + widths[1]];
    let rows = [(y0, split - y0), (split, y1 + 1 - split)];
    let mut regions = Vec::with_capacity(6);
    for (half, &(ry, rh)) in rows.iter().enumerate() {
        for band in 0..3 {
            let rect = Rect {
                x: starts[band],
                y: ry,
                w: widths[band],
                h: rh,
            };
            let mut valid = Vec::with_capacity(rect.area());
            for y in rect.y..rect.y + rect.h {
                for x in rect.x..rect.x + rect.w {
                    valid.push(mask.get(x, y) != 0);
                }
            }
            regions.push(Region {
                label: RegionLabel::ALL[half * 3 + band],
                rect,
                valid,
            });
        }
    }
    Ok(SixRegions { regions })
}
