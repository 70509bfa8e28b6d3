//! Mini-batch momentum SGD on the contrastive loss.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::{batch_loss, Network};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub channels: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub margin: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            channels: 8,
            learning_rate: 1e-3,
            momentum: 0.9,
            batch_size: 32,
            epochs: 50,
            margin: 1.0,
            seed: 7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.channels == 0 {
            return bad("train.channels must be positive");
        }
        if !(self.learning_rate > 0.0) || !(0.0..1.0).contains(&self.momentum) {
            return bad("train.learning_rate must be positive and train.momentum in [0, 1)");
        }
        if self.batch_size == 0 || self.epochs == 0 {
            return bad("train.batch_size and train.epochs must be positive");
        }
        if !(self.margin > 0.0) {
            return bad("train.margin must be positive");
        }
        Ok(())
    }
}

/// Indices into a vector set plus the same-subject label.
pub type Pair = (usize, usize, bool);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_loss: f64,
    pub val_loss: Option<f64>,
    pub epochs: usize,
}

fn check_labels(pairs: &[Pair]) -> Result<()> {
    if !pairs.iter().any(|p| p.2) {
        return Err(Error::NoPositivePairs);
    }
    if !pairs.iter().any(|p| !p.2) {
        return Err(Error::NoNegativePairs);
    }
    Ok(())
}

/// One positive and one negative partner for every vector, drawn uniformly.
pub fn sample_pairs(labels: &[usize], rng: &mut impl Rng) -> Vec<Pair> {
    let mut out = Vec::with_capacity(2 * labels.len());
    for (i, &li) in labels.iter().enumerate() {
        let pos: Vec<usize> = (0..labels.len()).filter(|&j| j != i && labels[j] == li).collect();
        let neg: Vec<usize> = (0..labels.len()).filter(|&j| labels[j] != li).collect();
        if !pos.is_empty() {
            out.push((i, pos[rng.random_range(0..pos.len())], true));
        }
        if !neg.is_empty() {
            out.push((i, neg[rng.random_range(0..neg.len())], false));
        }
    }
    out
}

/// Mean loss of `pairs` under `net`.
pub fn pairs_loss(net: &Network, vectors: &[Vec<f64>], pairs: &[Pair], margin: f64) -> Result<f64> {
    let refs: Vec<(&[f64], &[f64], bool)> = pairs
        .iter()
        .map(|&(a, b, s)| (&vectors[a][..], &vectors[b][..], s))
        .collect();
    batch_loss(net, &refs, margin, None)
}

struct Sgd {
    velocity: Vec<f64>,
    grad: Vec<f64>,
}

fn run_epoch(
    net: &mut Network,
    sgd: &mut Sgd,
    vectors: &[Vec<f64>],
    pairs: &[Pair],
    cfg: &TrainConfig,
    epoch: usize,
    last_loss: &mut f64,
) -> Result<()> {
    for (batch, chunk) in pairs.chunks(cfg.batch_size).enumerate() {
        let refs: Vec<(&[f64], &[f64], bool)> = chunk
            .iter()
            .map(|&(a, b, s)| (&vectors[a][..], &vectors[b][..], s))
            .collect();
        let loss = batch_loss(net, &refs, cfg.margin, Some(&mut sgd.grad))?;
        if !loss.is_finite() || sgd.grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss {
                epoch,
                batch,
                last_loss: *last_loss,
            });
        }
        *last_loss = loss;
        for ((p, v), g) in net.params.iter_mut().zip(&mut sgd.velocity).zip(&sgd.grad) {
            *v = cfg.momentum * *v - cfg.learning_rate * g;
            *p += *v;
        }
    }
    Ok(())
}

/// Trains on a fixed pair list, reshuffled every epoch.
pub fn train_pairs(
    vectors: &[Vec<f64>],
    pairs: &[Pair],
    val: Option<(&[Vec<f64>], &[Pair])>,
    cfg: &TrainConfig,
) -> Result<(Network, TrainReport)> {
    cfg.validate()?;
    check_labels(pairs)?;
    let dim = vectors.first().map(|v| v.len()).ok_or(Error::EmptyInput)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = Network::init(dim, cfg.channels, rng.random());
    let mut sgd = Sgd {
        velocity: vec![0.0; net.params.len()],
        grad: vec![0.0; net.params.len()],
    };
    let mut order = pairs.to_vec();
    let mut last = f64::NAN;
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        run_epoch(&mut net, &mut sgd, vectors, &order, cfg, epoch, &mut last)?;
    }
    let report = TrainReport {
        train_loss: pairs_loss(&net, vectors, pairs, cfg.margin)?,
        val_loss: match val {
            Some((v, p)) if !p.is_empty() => Some(pairs_loss(&net, v, p, cfg.margin)?),
            _ => None,
        },
        epochs: cfg.epochs,
    };
    Ok((net, report))
}

/// Trains on labelled vectors, drawing fresh pairs every epoch.
pub fn train_subjects(
    vectors: &[Vec<f64>],
    labels: &[usize],
    val: Option<(&[Vec<f64>], &[usize])>,
    cfg: &TrainConfig,
) -> Result<(Network, TrainReport)> {
    cfg.validate()?;
    if vectors.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: vectors.len(),
            found: labels.len(),
        });
    }
    let dim = vectors.first().map(|v| v.len()).ok_or(Error::EmptyInput)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    check_labels(&sample_pairs(labels, &mut ChaCha8Rng::seed_from_u64(cfg.seed)))?;
    let mut net = Network::init(dim, cfg.channels, rng.random());
    let mut sgd = Sgd {
        velocity: vec![0.0; net.params.len()],
        grad: vec![0.0; net.params.len()],
    };
    let mut last = f64::NAN;
    let mut pairs = Vec::new();
    for epoch in 0..cfg.epochs {
        pairs = sample_pairs(labels, &mut rng);
        pairs.shuffle(&mut rng);
        run_epoch(&mut net, &mut sgd, vectors, &pairs, cfg, epoch, &mut last)?;
    }
    let val_loss = match val {
        Some((v, l)) => {
            let p = sample_pairs(l, &mut ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed));
            if p.is_empty() {
                None
            } else {
                Some(pairs_loss(&net, v, &p, cfg.margin)?)
            }
        }
        None => None,
    };
    let report = TrainReport {
        train_loss: pairs_loss(&net, vectors, &pairs, cfg.margin)?,
        val_loss,
        epochs: cfg.epochs,
    };
    Ok((net, report))
}
