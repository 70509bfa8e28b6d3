//! Regional lip texture: steerable responses, co-occurrence statistics and
//! a per-(region, statistic) PCA over the orientation axis.

pub mod glcm;
pub mod pca;
pub mod regions;
pub mod steerable;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use glcm::{glcm, glcm_stats, Glcm, GlcmStats};
pub use pca::{pca_fit, PcaBasis};
pub use regions::{split_mask, split_regions, Region, RegionLabel, RegionTiling, SixRegions};
pub use steerable::{steerable_response, steering_weights, BasisResponses, SteerableBasis};

use crate::error::{Error, Result};
use crate::ingest::LipRoi;

pub const ORIENTATIONS: [f64; 8] = [0.0, 22.5, 45.0, 67.5, 90.0, 112.5, 135.0, 157.5];
pub const STATS: usize = 5;
pub const RAW_DIM: usize = 6 * STATS * ORIENTATIONS.len();
pub const PCA_COMPONENTS: usize = 2;
pub const BLOCK_DIM: usize = 6 * STATS * PCA_COMPONENTS;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TextureConfig {
    pub sigma: f64,
    pub levels: usize,
    pub distance: usize,
}

impl Default for TextureConfig {
    fn default() -> Self {
        TextureConfig {
            sigma: 2.0,
            levels: 16,
            distance: 1,
        }
    }
}

impl TextureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig("texture.sigma must be positive".into()));
        }
        if self.levels < 2 || self.distance < 1 {
            return Err(Error::InvalidConfig(
                "texture.levels must be >= 2 and texture.distance >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Five statistics by eight orientations for one region.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GlcmFeatures {
    pub matrix: [[f64; 8]; STATS],
}

/// Statistics of a region too small to pair: treated like a constant region.
const POINT_MASS: [f64; STATS] = [1.0, 0.0, 0.0, 1.0, 0.0];

/// Per-region 5x8 matrices in `RegionLabel::ALL` order.
pub fn frame_glcm_features(roi: &LipRoi, config: &TextureConfig) -> Result<[GlcmFeatures; 6]> {
    let regions = split_regions(roi)?;
    let gray = roi.gray.to_real();
    let basis = SteerableBasis::new(config.sigma).responses(&gray);
    let mut out = [GlcmFeatures::default(); 6];
    for (o, &deg) in ORIENTATIONS.iter().enumerate() {
        let response = basis.steer(deg);
        for region in &regions.regions {
            let stats = match glcm(&response, region, config.levels, config.distance) {
                Ok(m) => glcm_stats(&m)?.to_array(),
                Err(Error::TooFewPixels) => POINT_MASS,
                Err(e) => return Err(e),
            };
            let f = &mut out[region.label.index()];
            for (row, v) in stats.iter().enumerate() {
                f.matrix[row][o] = *v;
            }
        }
    }
    Ok(out)
}

/// Flattens to `RAW_DIM` values: region-major, then statistic, then orientation.
pub fn flatten_raw(features: &[GlcmFeatures; 6]) -> Vec<f64> {
    features
        .iter()
        .flat_map(|f| f.matrix.iter().flat_map(|row| row.iter().copied()))
        .collect()
}

/// Thirty frozen 8 -> 2 bases, one per (region, statistic).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TexturePca {
    pub bases: Vec<PcaBasis>,
}

impl TexturePca {
    /// Fits on raw texture vectors of length `RAW_DIM`.
    pub fn fit<V: AsRef<[f64]>>(training: &[V]) -> Result<TexturePca> {
        if let Some(bad) = training.iter().find(|v| v.as_ref().len() != RAW_DIM) {
            return Err(Error::DimensionMismatch {
                expected: RAW_DIM,
                found: bad.as_ref().len(),
            });
        }
        let n = ORIENTATIONS.len();
        let mut bases = Vec::with_capacity(6 * STATS);
        for block in 0..6 * STATS {
            let rows: Vec<&[f64]> = training
                .iter()
                .map(|v| &v.as_ref()[block * n..(block + 1) * n])
                .collect();
            bases.push(pca_fit(&rows, PCA_COMPONENTS)?);
        }
        Ok(TexturePca { bases })
    }

    /// Number of bases whose training covariance was zero.
    pub fn rank_deficient_count(&self) -> usize {
        self.bases.iter().filter(|b| b.rank_deficient).count()
    }

    pub fn apply(&self, raw: &[f64]) -> Vec<f64> {
        assert_eq!(raw.len(), RAW_DIM, "raw texture dimension");
        let n = ORIENTATIONS.len();
        self.bases
            .iter()
            .enumerate()
            .flat_map(|(block, b)| b.apply(&raw[block * n..(block + 1) * n]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn block_shapes() {
        assert_eq!(RAW_DIM, 240);
        assert_eq!(BLOCK_DIM, 60);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<Vec<f64>> = (0..12)
            .map(|_| (0..RAW_DIM).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let pca = TexturePca::fit(&data).unwrap();
        assert_eq!(pca.bases.len(), 30);
        assert_eq!(pca.apply(&data[0]).len(), BLOCK_DIM);
    }

    #[test]
    fn flatten_order() {
        let mut f = [GlcmFeatures::default(); 6];
        f[2].matrix[3][5] = 7.0;
        let flat = flatten_raw(&f);
        assert_eq!(flat[2 * 40 + 3 * 8 + 5], 7.0);
        assert_eq!(flat.iter().filter(|&&v| v != 0.0).count(), 1);
    }
}
