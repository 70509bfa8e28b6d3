//! Progressive probabilistic Hough transform for line segments.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::Point;
use crate::raster::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HoughConfig {
    pub rho: f64,
    pub theta_deg: f64,
    pub threshold: u32,
    pub min_length: f64,
    pub max_gap: usize,
    pub seed: u64,
}

impl Default for HoughConfig {
    fn default() -> Self {
        HoughConfig {
            rho: 1.0,
            theta_deg: 1.0,
            threshold: 10,
            min_length: 5.0,
            max_gap: 2,
            seed: 0x11c0_ffee,
        }
    }
}

const SHIFT: u32 = 16;

/// Segments as endpoint pairs on nonzero pixels of `edges`.
///
/// Edge points are visited in a seeded random order. Each visit votes; once
/// some bin reaches the threshold the line through the point is walked in both
/// directions, tolerating `max_gap` missing pixels, and its pixels are removed
/// (and unvoted when the segment is long enough).
pub fn hough_segments(edges: &GrayImage, cfg: &HoughConfig) -> Vec<(Point, Point)> {
    let (w, h) = (edges.width() as i64, edges.height() as i64);
    let num_angle = (180.0 / cfg.theta_deg).round() as usize;
    let num_rho = (((w + h) * 2 + 1) as f64 / cfg.rho).round() as usize;
    let irho = 1.0 / cfg.rho;
    let trig: Vec<(f64, f64)> = (0..num_angle)
        .map(|n| {
            let t = (n as f64 * cfg.theta_deg).to_radians();
            (t.cos() * irho, t.sin() * irho)
        })
        .collect();
    let mut acc = vec![0i32; num_angle * num_rho];
    let mut mask = vec![false; (w * h) as usize];
    let mut points: Vec<(i64, i64)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if edges.get(x as usize, y as usize) != 0 {
                mask[(y * w + x) as usize] = true;
                points.push((x, y));
            }
        }
    }
    let rho_bin = |x: i64, y: i64, n: usize| -> usize {
        let r = (x as f64 * trig[n].0 + y as f64 * trig[n].1).round() as i64;
        (r + (num_rho as i64 - 1) / 2) as usize
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    let mut count = points.len();
    while count > 0 {
        let idx = rng.random_range(0..count);
        let (px, py) = points[idx];
        points[idx] = points[count - 1];
        count -= 1;
        if !mask[(py * w + px) as usize] {
            continue;
        }
        let mut max_val = cfg.threshold as i32 - 1;
        let mut max_n = 0;
        for n in 0..num_angle {
            let cell = &mut acc[n * num_rho + rho_bin(px, py, n)];
            *cell += 1;
            if *cell > max_val {
                max_val = *cell;
                max_n = n;
            }
        }
        if max_val < cfg.threshold as i32 {
            continue;
        }
        // direction along the line, whose normal is at angle max_n
        let a = -trig[max_n].1;
        let b = trig[max_n].0;
        let (x0, y0, dx0, dy0, xflag);
        if a.abs() > b.abs() {
            xflag = true;
            dx0 = if a > 0.0 { 1 } else { -1 };
            dy0 = (b * (1i64 << SHIFT) as f64 / a.abs()).round() as i64;
            x0 = px;
            y0 = (py << SHIFT) + (1 << (SHIFT - 1));
        } else {
            xflag = false;
            dy0 = if b > 0.0 { 1 } else { -1 };
            dx0 = (a * (1i64 << SHIFT) as f64 / b.abs()).round() as i64;
            x0 = (px << SHIFT) + (1 << (SHIFT - 1));
            y0 = py;
        }
        let to_pixel = |x: i64, y: i64| if xflag { (x, y >> SHIFT) } else { (x >> SHIFT, y) };
        let mut ends = [(px, py); 2];
        for (k, end) in ends.iter_mut().enumerate() {
            let (dx, dy) = if k == 0 { (dx0, dy0) } else { (-dx0, -dy0) };
            let (mut x, mut y, mut gap) = (x0, y0, 0);
            loop {
                let (j, i) = to_pixel(x, y);
                if j < 0 || j >= w || i < 0 || i >= h {
                    break;
                }
                if mask[(i * w + j) as usize] {
                    gap = 0;
                    *end = (j, i);
                } else {
                    gap += 1;
                    if gap > cfg.max_gap {
                        break;
                    }
                }
                x += dx;
                y += dy;
            }
        }
        let good = (ends[1].0 - ends[0].0).abs() as f64 >= cfg.min_length
            || (ends[1].1 - ends[0].1).abs() as f64 >= cfg.min_length;
        for (k, end) in ends.iter().enumerate() {
            let (dx, dy) = if k == 0 { (dx0, dy0) } else { (-dx0, -dy0) };
            let (mut x, mut y) = (x0, y0);
            loop {
                let (j, i) = to_pixel(x, y);
                let m = &mut mask[(i * w + j) as usize];
                if *m {
                    if good {
                        for n in 0..num_angle {
                            acc[n * num_rho + rho_bin(j, i, n)] -= 1;
                        }
                    }
                    *m = false;
                }
                if (j, i) == *end {
                    break;
                }
                x += dx;
                y += dy;
            }
        }
        if good {
            out.push((
                Point::new(ends[0].0 as f64, ends[0].1 as f64),
                Point::new(ends[1].0 as f64, ends[1].1 as f64),
            ));
        }
    }
    out
}
