//! Contrast-limited adaptive histogram equalization on 8-bit images.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use crate::raster::{reflect101, GrayImage};

/// `tiles_x * tiles_y` tile grid; the image is padded by reflection when its
/// size is not a multiple of the tile count.
pub fn clahe(image: &GrayImage, clip_limit: f64, tiles_x: usize, tiles_y: usize) -> GrayImage {
    let (w, h) = (image.width(), image.height());
    if w == 0 || h == 0 {
        return image.clone();
    }
    let tw = w.div_ceil(tiles_x);
    let th = h.div_ceil(tiles_y);
    let tile_area = tw * th;
    let padded = |x: usize, y: usize| -> u8 {
        image.get(reflect101(x as isize, w), reflect101(y as isize, h))
    };
    let clip = if clip_limit > 0.0 {
        ((clip_limit * tile_area as f64 / 256.0) as usize).max(1)
    } else {
        usize::MAX
    };
    let scale = 255.0 / tile_area as f64;
    let mut luts: Vec<[u8; 256]> = Vec::with_capacity(tiles_x * tiles_y);
    for ty in 0..tiles_y {
        for tx in 0..tiles_x {
            let mut hist = vec![0usize; 256];
            for y in ty * th..(ty + 1) * th {
                for x in tx * tw..(tx + 1) * tw {
                    hist[padded(x, y) as usize] += 1;
                }
            }
            if clip != usize::MAX {
                let mut excess = 0;
                for b in hist.iter_mut() {
                    if *b > clip {
                        excess += *b - clip;
                        *b = clip;
                    }
                }
                let batch = excess / 256;
                let residual = excess - batch * 256;
                for b in hist.iter_mut() {
                    *b += batch;
                }
                if residual > 0 {
                    let step = (256 / residual).max(1);
                    let mut i = 0;
                    let mut left = residual;
                    while i < 256 && left > 0 {
                        hist[i] += 1;
                        i += step;
                        left -= 1;
                    }
                }
            }
            let mut lut = [0u8; 256];
            let mut sum = 0usize;
            for (v, b) in hist.iter().enumerate() {
                sum += b;
                lut[v] = (sum as f64 * scale).round().clamp(0.0, 255.0) as u8;
            }
            luts.push(lut);
        }
    }
    GrayImage::from_fn(w, h, |x, y| {
        let v = image.get(x, y) as usize;
        let fx = (x as f64 + 0.5) / tw as f64 - 0.5;
        let fy = (y as f64 + 0.5) / th as f64 - 0.5;
        let x1 = fx.floor();
        let y1 = fy.floor();
        let ax = fx - x1;
        let ay = fy - y1;
        let cx = |t: f64| t.clamp(0.0, (tiles_x - 1) as f64) as usize;
        let cy = |t: f64| t.clamp(0.0, (tiles_y - 1) as f64) as usize;
        let (tx1, tx2) = (cx(x1), cx(x1 + 1.0));
        let (ty1, ty2) = (cy(y1), cy(y1 + 1.0));
        let at = |tx: usize, ty: usize| luts[ty * tiles_x + tx][v] as f64;
        let top = at(tx1, ty1) * (1.0 - ax) + at(tx2, ty1) * ax;
        let bottom = at(tx1, ty2) * (1.0 - ax) + at(tx2, ty2) * ax;
        (top * (1.0 - ay) + bottom * ay).round().clamp(0.0, 255.0) as u8
    })
}
