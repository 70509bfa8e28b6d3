#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use crate::raster::{reflect101, GrayImage};

/// Edge-preserving smoothing over a disc of diameter `d`.
pub fn bilateral(image: &GrayImage, d: usize, sigma_color: f64, sigma_space: f64) -> GrayImage {
    let (w, h) = (image.width(), image.height());
    let r = (d / 2) as isize;
    let mut taps: Vec<(isize, isize, f64)> = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let dist2 = (dx * dx + dy * dy) as f64;
            if dist2.sqrt() <= r as f64 {
                taps.push((dx, dy, (-dist2 / (2.0 * sigma_space * sigma_space)).exp()));
            }
        }
    }
    let mut color = [0.0; 256];
    for (i, c) in color.iter_mut().enumerate() {
        let i = i as f64;
        *c = (-i * i / (2.0 * sigma_color * sigma_color)).exp();
    }
    GrayImage::from_fn(w, h, |x, y| {
        let center = image.get(x, y) as i32;
        let (mut num, mut den) = (0.0, 0.0);
        for &(dx, dy, ws) in &taps {
            let v = image.get(
                reflect101(x as isize + dx, w),
                reflect101(y as isize + dy, h),
            ) as i32;
            let wt = ws * color[(v - center).unsigned_abs() as usize];
            num += wt * v as f64;
            den += wt;
        }
        (num / den).round().clamp(0.0, 255.0) as u8
    })
}
