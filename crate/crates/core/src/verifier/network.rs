//! Shared-weight embedding network: 1-D convolution, ReLU, global average
//! pooling, dense projection.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const KERNEL_WIDTH: usize = 5;
pub const EMBEDDING_DIM: usize = 32;

/// Parameters live in one flat vector: conv weights (channel-major), conv
/// biases, dense weights (output-major), dense biases. Both twins read it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub input_dim: usize,
    pub channels: usize,
    pub params: Vec<f64>,
}

/// Intermediate values kept for backpropagation.
pub struct Trace {
    pre: Vec<f64>,
    pooled: Vec<f64>,
    pub embedding: Vec<f64>,
}

impl Network {
    pub fn param_count(input_dim: usize, channels: usize) -> usize {
        let _ = input_dim;
        channels * KERNEL_WIDTH + channels + EMBEDDING_DIM * channels + EMBEDDING_DIM
    }

    pub fn zeros(input_dim: usize, channels: usize) -> Self {
        assert!(input_dim >= KERNEL_WIDTH, "input shorter than the kernel");
        Network {
            input_dim,
            channels,
            params: vec![0.0; Self::param_count(input_dim, channels)],
        }
    }

    /// Uniform fan-in scaled initialization, biases zero.
    pub fn init(input_dim: usize, channels: usize, seed: u64) -> Self {
        let mut net = Self::zeros(input_dim, channels);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let conv_lim = (6.0 / KERNEL_WIDTH as f64).sqrt();
        let dense_lim = (6.0 / (channels + EMBEDDING_DIM) as f64).sqrt();
        let (cw, _, dw, _) = net.offsets();
        for v in &mut net.params[cw.clone()] {
            *v = rng.random_range(-conv_lim..conv_lim);
        }
        for v in &mut net.params[dw] {
            *v = rng.random_range(-dense_lim..dense_lim);
        }
        net
    }

    pub fn positions(&self) -> usize {
        self.input_dim - KERNEL_WIDTH + 1
    }

    fn offsets(
        &self,
    ) -> (
        core::ops::Range<usize>,
        core::ops::Range<usize>,
        core::ops::Range<usize>,
        core::ops::Range<usize>,
    ) {
        let k = self.channels;
        let a = k * KERNEL_WIDTH;
        let b = a + k;
        let c = b + EMBEDDING_DIM * k;
        (0..a, a..b, b..c, c..c + EMBEDDING_DIM)
    }

    pub fn forward(&self, x: &[f64]) -> Result<Trace> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: x.len(),
            });
        }
        let (cw, cb, dw, db) = self.offsets();
        let (cw, cb, dw, db) = (
            &self.params[cw],
            &self.params[cb],
            &self.params[dw],
            &self.params[db],
        );
        let l = self.positions();
        let mut pre = vec![0.0; self.channels * l];
        let mut pooled = vec![0.0; self.channels];
        for ch in 0..self.channels {
            let w = &cw[ch * KERNEL_WIDTH..(ch + 1) * KERNEL_WIDTH];
            let mut sum = 0.0;
            for t in 0..l {
                let mut h = cb[ch];
                for u in 0..KERNEL_WIDTH {
                    h += w[u] * x[t + u];
                }
                pre[ch * l + t] = h;
                if h > 0.0 {
                    sum += h;
                }
            }
            pooled[ch] = sum / l as f64;
        }
        let embedding = (0..EMBEDDING_DIM)
            .map(|o| {
                let row = &dw[o * self.channels..(o + 1) * self.channels];
                db[o] + row.iter().zip(&pooled).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect();
        Ok(Trace {
            pre,
            pooled,
            embedding,
        })
    }

    pub fn embed(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(x)?.embedding)
    }

    /// Adds `d loss / d params` to `grad` given `d loss / d embedding`.
    pub fn backward(&self, x: &[f64], trace: &Trace, d_embedding: &[f64], grad: &mut [f64]) {
        let (cw_r, cb_r, dw_r, db_r) = self.offsets();
        let k = self.channels;
        let l = self.positions();
        let dw = &self.params[dw_r.clone()];
        let mut d_pooled = vec![0.0; k];
        for o in 0..EMBEDDING_DIM {
            let g = d_embedding[o];
            grad[db_r.start + o] += g;
            for ch in 0..k {
                grad[dw_r.start + o * k + ch] += g * trace.pooled[ch];
                d_pooled[ch] += g * dw[o * k + ch];
            }
        }
        for ch in 0..k {
            let g = d_pooled[ch] / l as f64;
            if g == 0.0 {
                continue;
            }
            let mut gb = 0.0;
            let mut gw = [0.0; KERNEL_WIDTH];
            for t in 0..l {
                if trace.pre[ch * l + t] > 0.0 {
                    gb += g;
                    for u in 0..KERNEL_WIDTH {
                        gw[u] += g * x[t + u];
                    }
                }
            }
            grad[cb_r.start + ch] += gb;
            for u in 0..KERNEL_WIDTH {
                grad[cw_r.start + ch * KERNEL_WIDTH + u] += gw[u];
            }
        }
    }

    /// Smallest |pre-activation| over the inputs; gradient checks need it
    /// clear of the ReLU kink.
    pub fn min_activation_margin(&self, x: &[f64]) -> Result<f64> {
        Ok(self
            .forward(x)?
            .pre
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs())))
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "embedding dimensions differ");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `y d^2 + (1 - y) max(0, m - d)^2` with `y = 1` for same-subject pairs.
pub fn contrastive_loss(d: f64, same: bool, margin: f64) -> f64 {
    if same {
        d * d
    } else {
        let h = (margin - d).max(0.0);
        h * h
    }
}

/// Loss of one pair and its gradients with respect to both embeddings.
pub fn pair_loss_grad(a: &[f64], b: &[f64], same: bool, margin: f64) -> (f64, Vec<f64>, Vec<f64>) {
    let d = distance(a, b);
    let loss = contrastive_loss(d, same, margin);
    let scale = if same {
        2.0
    } else if d < margin && d > 0.0 {
        -2.0 * (margin - d) / d
    } else {
        0.0
    };
    let ga: Vec<f64> = a.iter().zip(b).map(|(x, y)| scale * (x - y)).collect();
    let gb = ga.iter().map(|v| -v).collect();
    (loss, ga, gb)
}

/// Mean contrastive loss of a batch and, optionally, its parameter gradient.
pub fn batch_loss(
    net: &Network,
    pairs: &[(&[f64], &[f64], bool)],
    margin: f64,
    mut grad: Option<&mut [f64]>,
) -> Result<f64> {
    if let Some(g) = grad.as_deref_mut() {
        g.iter_mut().for_each(|v| *v = 0.0);
    }
    let n = pairs.len() as f64;
    let mut total = 0.0;
    for &(xa, xb, same) in pairs {
        let ta = net.forward(xa)?;
        let tb = net.forward(xb)?;
        let (loss, ga, gb) = pair_loss_grad(&ta.embedding, &tb.embedding, same, margin);
        total += loss;
        if let Some(g) = grad.as_deref_mut() {
            let ga: Vec<f64> = ga.iter().map(|v| v / n).collect();
            let gb: Vec<f64> = gb.iter().map(|v| v / n).collect();
            net.backward(xa, &ta, &ga, g);
            net.backward(xb, &tb, &gb, g);
        }
    }
    Ok(total / n)
}
