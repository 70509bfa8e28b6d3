//! Canny edge detection with 3x3 Sobel gradients and L1 magnitude.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use crate::raster::{reflect101, GrayImage};

/// Returns a 0/255 edge map. Pixels with magnitude above `high` seed edges;
/// those above `low` join when 8-connected to a seed.
pub fn canny(image: &GrayImage, low: f64, high: f64) -> GrayImage {
    let (w, h) = (image.width(), image.height());
    let px = |x: isize, y: isize| image.get(reflect101(x, w), reflect101(y, h)) as f64;
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    let mut mag = vec![0.0; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let dx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            let dy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            let i = y as usize * w + x as usize;
            gx[i] = dx;
            gy[i] = dy;
            mag[i] = dx.abs() + dy.abs();
        }
    }
    let m = |x: isize, y: isize| -> f64 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            mag[y as usize * w + x as usize]
        }
    };
    // 0: none, 1: weak candidate, 2: strong
    let mut state = vec![0u8; w * h];
    let tan22 = core::f64::consts::FRAC_PI_8.tan();
    for y in 0..h as isize {
        for x in 0..w as isize {
            let i = y as usize * w + x as usize;
            let v = mag[i];
            if v <= low {
                continue;
            }
            let (ax, ay) = (gx[i].abs(), gy[i].abs());
            // ties go to the later neighbour so plateaus keep one pixel
            let is_max = if ay <= ax * tan22 {
                v > m(x - 1, y) && v >= m(x + 1, y)
            } else if ay > ax / tan22 {
                v > m(x, y - 1) && v >= m(x, y + 1)
            } else if (gx[i] > 0.0) == (gy[i] > 0.0) {
                v > m(x - 1, y - 1) && v >= m(x + 1, y + 1)
            } else {
                v > m(x + 1, y - 1) && v >= m(x - 1, y + 1)
            };
            if is_max {
                state[i] = if v > high { 2 } else { 1 };
            }
        }
    }
    let mut out = GrayImage::filled(w, h, 0);
    let mut stack: Vec<usize> = (0..w * h).filter(|&i| state[i] == 2).collect();
    for &i in &stack {
        out.data_mut()[i] = 255;
    }
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if state[j] == 1 && out.data()[j] == 0 {
                    out.data_mut()[j] = 255;
                    stack.push(j);
                }
            }
        }
    }
    out
}
