//! Gray-level co-occurrence matrices over a region and their Haralick-style statistics.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::regions::Region;
use crate::error::{Error, Result};
use crate::raster::RealImage;

/// Normalized, symmetric `levels x levels` co-occurrence matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Glcm {
    pub levels: usize,
    pub p: Vec<f64>,
}

impl Glcm {
    pub fn from_probabilities(levels: usize, p: Vec<f64>) -> Self {
        assert_eq!(p.len(), levels * levels);
        Glcm { levels, p }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.levels + j]
    }
}

/// Linearly quantizes the region's valid pixels to `levels` bins over their
/// min-max range and counts horizontal pairs `distance` apart, both orders.
pub fn glcm(response: &RealImage, region: &Region, levels: usize, distance: usize) -> Result<Glcm> {
    assert!(levels >= 2 && distance >= 1, "levels >= 2 and distance >= 1");
    let r = region.rect;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for y in r.y..r.y + r.h {
        for x in r.x..r.x + r.w {
            if region.is_valid(x, y) {
                let v = response.get(x, y);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    let span = hi - lo;
    let quantize = |v: f64| -> usize {
        if !(span > 0.0) {
            return 0;
        }
        let q = ((v - lo) / span * levels as f64).floor();
        (q.max(0.0) as usize).min(levels - 1)
    };
    let mut counts = vec![0u64; levels * levels];
    let mut pairs = 0u64;
    for y in r.y..r.y + r.h {
        for x in r.x..r.x + r.w.saturating_sub(distance) {
            let x2 = x + distance;
            if !region.is_valid(x, y) || !region.is_valid(x2, y) {
                continue;
            }
            let a = quantize(response.get(x, y));
            let b = quantize(response.get(x2, y));
            counts[a * levels + b] += 1;
            counts[b * levels + a] += 1;
            pairs += 1;
        }
    }
    if pairs < 2 {
        return Err(Error::TooFewPixels);
    }
    let total = (2 * pairs) as f64;
    Ok(Glcm {
        levels,
        p: counts.iter().map(|&c| c as f64 / total).collect(),
    })
}

/// ASM, contrast, correlation, inverse difference moment, entropy (bits).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GlcmStats {
    pub asm: f64,
    pub contrast: f64,
    pub correlation: f64,
    pub idm: f64,
    pub entropy: f64,
}

impl GlcmStats {
    pub fn to_array(self) -> [f64; 5] {
        [self.asm, self.contrast, self.correlation, self.idm, self.entropy]
    }
}

pub fn glcm_stats(m: &Glcm) -> Result<GlcmStats> {
    let sum: f64 = m.p.iter().sum();
    if (sum - 1.0).abs() > 1e-6 || m.p.iter().any(|&v| v < 0.0) {
        return Err(Error::NotNormalized { sum });
    }
    let n = m.levels;
    let (mut mu_i, mut mu_j) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let p = m.at(i, j);
            mu_i += i as f64 * p;
            mu_j += j as f64 * p;
        }
    }
    let mut s = GlcmStats::default();
    let (mut var_i, mut var_j, mut cov) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let p = m.at(i, j);
            let di = i as f64 - mu_i;
            let dj = j as f64 - mu_j;
            let d = i as f64 - j as f64;
            s.asm += p * p;
            s.contrast += d * d * p;
            s.idm += p / (1.0 + d * d);
            var_i += di * di * p;
            var_j += dj * dj * p;
            cov += di * dj * p;
            if p > 0.0 {
                s.entropy -= p * p.log2();
            }
        }
    }
    let denom = (var_i * var_j).sqrt();
    s.correlation = if denom > 0.0 { cov / denom } else { 0.0 };
    Ok(s)
}
