//! Window vectors, the shared-weight embedding network, thresholds and templates.

pub mod network;
pub mod template;
pub mod threshold;
pub mod train;
pub mod transform;

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use network::{contrastive_loss, distance, Network, EMBEDDING_DIM, KERNEL_WIDTH};
pub use template::{enroll, verify, ContinuousVerifier, Decision, Template, MIN_ENROLL_WINDOWS};
pub use threshold::{choose_threshold, equal_error_rate, ThresholdChoice};
pub use train::{train_pairs, train_subjects, Pair, TrainConfig, TrainReport};
pub use transform::{block_range, FeatureTransform, FEATURE_DIM, MODEL_DIM};

use crate::error::Result;
use crate::pipeline::RawWindow;

/// Trained verifier: feature transform, network and decision threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub transform: FeatureTransform,
    pub network: Network,
    pub config: TrainConfig,
    /// Threshold chosen on held-out windows at training time.
    pub threshold: f64,
    pub report: TrainReport,
    /// First eight bytes of a SHA-256 over everything above.
    pub version: u64,
}

impl Model {
    pub fn new(
        transform: FeatureTransform,
        network: Network,
        config: TrainConfig,
        threshold: f64,
        report: TrainReport,
    ) -> Model {
        let mut m = Model {
            transform,
            network,
            config,
            threshold,
            report,
            version: 0,
        };
        m.version = m.fingerprint();
        m
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = Sha256::new();
        let mut put = |v: f64| h.update(v.to_le_bytes());
        for basis in &self.transform.texture_pca.bases {
            basis.mean.iter().for_each(|&v| put(v));
            basis.components.iter().flatten().for_each(|&v| put(v));
            put(basis.rank_deficient as u8 as f64);
        }
        self.transform.mean.iter().for_each(|&v| put(v));
        self.transform.std.iter().for_each(|&v| put(v));
        put(self.network.input_dim as f64);
        put(self.network.channels as f64);
        self.network.params.iter().for_each(|&v| put(v));
        put(self.config.margin);
        put(self.config.seed as f64);
        put(self.threshold);
        let digest = h.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }

    /// Normalized network input for one window.
    pub fn prepare(&self, raw: &RawWindow) -> Result<Vec<f64>> {
        self.transform.apply(raw)
    }

    pub fn embed_raw(&self, raw: &RawWindow) -> Result<Vec<f64>> {
        self.network.embed(&self.prepare(raw)?)
    }
}

/// Fits the transform, trains the network and picks a threshold from
/// validation windows scored against galleries built from training windows.
pub fn fit_model(
    train: &[RawWindow],
    train_labels: &[usize],
    val: &[RawWindow],
    val_labels: &[usize],
    cfg: &TrainConfig,
) -> Result<Model> {
    fit_model_with(train, train_labels, None, (val, val_labels), cfg)
}

/// Like [`fit_model`], but the threshold galleries come from `gallery`
/// when given (held-out subjects) instead of the training windows.
pub fn fit_model_with(
    train: &[RawWindow],
    train_labels: &[usize],
    gallery: Option<(&[RawWindow], &[usize])>,
    probes: (&[RawWindow], &[usize]),
    cfg: &TrainConfig,
) -> Result<Model> {
    let transform = FeatureTransform::fit(train)?;
    let prep = |ws: &[RawWindow]| ws.iter().map(|w| transform.apply(w)).collect::<Result<Vec<_>>>();
    let tv = prep(train)?;
    let pv = prep(probes.0)?;
    let (network, report) = train_subjects(&tv, train_labels, Some((&pv, probes.1)), cfg)?;
    let embed = |vs: &[Vec<f64>]| vs.iter().map(|v| network.embed(v)).collect::<Result<Vec<_>>>();
    let (gallery_emb, gallery_labels) = match gallery {
        Some((g, gl)) => (embed(&prep(g)?)?, gl),
        None => (embed(&tv)?, train_labels),
    };
    let (genuine, impostor) = gallery_scores(&gallery_emb, gallery_labels, &embed(&pv)?, probes.1);
    let threshold = choose_threshold(&genuine, &impostor)?.tau;
    Ok(Model::new(transform, network, *cfg, threshold, report))
}

/// Scores every probe against every subject's gallery: min distance per
/// (probe, subject), split by whether the subject matches.
pub fn gallery_scores(
    gallery: &[Vec<f64>],
    gallery_labels: &[usize],
    probes: &[Vec<f64>],
    probe_labels: &[usize],
) -> (Vec<f64>, Vec<f64>) {
    let mut subjects: Vec<usize> = gallery_labels.to_vec();
    subjects.sort_unstable();
    subjects.dedup();
    let mut genuine = Vec::new();
    let mut impostor = Vec::new();
    for (p, &pl) in probes.iter().zip(probe_labels) {
        for &s in &subjects {
            let score = gallery
                .iter()
                .zip(gallery_labels)
                .filter(|(_, &l)| l == s)
                .map(|(g, _)| distance(g, p))
                .fold(f64::INFINITY, f64::min);
            if s == pl {
                genuine.push(score);
            } else {
                impostor.push(score);
            }
        }
    }
    (genuine, impostor)
}
