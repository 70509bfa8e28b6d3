//! Raw window features to fixed-length, normalized network input.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{Block, RawWindow, STATIC_DIM};
use crate::texture::{TexturePca, BLOCK_DIM as TEXTURE_DIM};
use crate::{articulator, lipprint};

pub const FEATURE_DIM: usize = STATIC_DIM + TEXTURE_DIM + lipprint::WINDOW_DIM + articulator::BLOCK_DIM;
pub const MODEL_DIM: usize = FEATURE_DIM + 4;

/// Positions of each block inside the reduced feature vector.
pub fn block_range(block: Block) -> core::ops::Range<usize> {
    let s = STATIC_DIM;
    let t = s + TEXTURE_DIM;
    let l = t + lipprint::WINDOW_DIM;
    match block {
        Block::Static => 0..s,
        Block::Texture => s..t,
        Block::Lipprint => t..l,
        Block::Articulator => l..FEATURE_DIM,
    }
}

/// Frozen texture PCA plus per-dimension z-score parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTransform {
    pub texture_pca: TexturePca,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Standard deviations below this normalize to 0.
const MIN_STD: f64 = 1e-12;

fn reduce(pca: &TexturePca, raw: &RawWindow) -> Vec<f64> {
    let mut v = Vec::with_capacity(FEATURE_DIM);
    v.extend_from_slice(&raw.static_block);
    if raw.present[Block::Texture.index()] {
        v.extend(pca.apply(&raw.texture_raw));
    } else {
        v.extend(core::iter::repeat_n(0.0, TEXTURE_DIM));
    }
    v.extend_from_slice(&raw.lipprint);
    v.extend_from_slice(&raw.articulator);
    v
}

fn check_required(raw: &RawWindow) -> Result<()> {
    if !raw.present[Block::Static.index()] || !raw.present[Block::Articulator.index()] {
        return Err(Error::MissingBlock);
    }
    Ok(())
}

impl FeatureTransform {
    /// Fits the texture PCA and the z-scores on training windows. Statistics
    /// of a block use only the windows where that block is present.
    pub fn fit(training: &[RawWindow]) -> Result<FeatureTransform> {
        for w in training {
            check_required(w)?;
        }
        let textures: Vec<&[f64]> = training
            .iter()
            .filter(|w| w.present[Block::Texture.index()])
            .map(|w| &w.texture_raw[..])
            .collect();
        let texture_pca = TexturePca::fit(&textures)?;
        let reduced: Vec<Vec<f64>> = training.iter().map(|w| reduce(&texture_pca, w)).collect();
        let mut mean = vec![0.0; FEATURE_DIM];
        let mut std = vec![0.0; FEATURE_DIM];
        for block in Block::ALL {
            let rows: Vec<&Vec<f64>> = training
                .iter()
                .zip(&reduced)
                .filter(|(w, _)| w.present[block.index()])
                .map(|(_, r)| r)
                .collect();
            let n = rows.len() as f64;
            for i in block_range(block) {
                if rows.is_empty() {
                    continue;
                }
                let m = rows.iter().map(|r| r[i]).sum::<f64>() / n;
                let var = if rows.len() > 1 {
                    rows.iter().map(|r| (r[i] - m) * (r[i] - m)).sum::<f64>() / (n - 1.0)
                } else {
                    0.0
                };
                mean[i] = m;
                std[i] = var.sqrt();
            }
        }
        Ok(FeatureTransform {
            texture_pca,
            mean,
            std,
        })
    }

    /// `MODEL_DIM` values: normalized blocks, absent blocks zero, then flags.
    pub fn apply(&self, raw: &RawWindow) -> Result<Vec<f64>> {
        check_required(raw)?;
        let checks = [
            (raw.static_block.len(), STATIC_DIM),
            (raw.texture_raw.len(), crate::texture::RAW_DIM),
            (raw.lipprint.len(), lipprint::WINDOW_DIM),
            (raw.articulator.len(), articulator::BLOCK_DIM),
        ];
        for (found, expected) in checks {
            if found != expected {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        let mut v = reduce(&self.texture_pca, raw);
        for block in Block::ALL {
            let present = raw.present[block.index()];
            for i in block_range(block) {
                v[i] = if !present || self.std[i] < MIN_STD {
                    0.0
                } else {
                    (v[i] - self.mean[i]) / self.std[i]
                };
            }
        }
        v.extend(raw.present.iter().map(|&p| p as u8 as f64));
        debug_assert!(v.iter().all(|x| x.is_finite()));
        Ok(v)
    }
}
