//! Evaluation protocol: metrics, k-fold cross-validation, attack scenarios
//! and the synthetic dataset generator.

pub mod attacks;
pub mod folds;
pub mod metrics;
pub mod synth;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use attacks::{blend_windows, static_photo_window, AttackRates};
pub use folds::{assign_folds, assign_subject_folds, fold_assignment, split, FoldSplit, FoldUnit};
pub use metrics::{metrics, pr_curve, Confusion, Metrics, PrPoint, Summary};
pub use synth::{synth_subjects, SubjectParams, SyntheticSubject};

use crate::error::{Error, Result};
use crate::ingest::extract_mouth;
use crate::pipeline::{clip_windows, frame_features, FrameFeatures, PipelineConfig, RawWindow};
use crate::verifier::{equal_error_rate, fit_model_with, verify, Model, Template, TrainConfig};

/// One subject's frame features and the windows cut from them.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectData {
    pub name: String,
    pub frames: Vec<FrameFeatures>,
    pub windows: Vec<RawWindow>,
    /// First frame of every window.
    pub starts: Vec<usize>,
}

impl SubjectData {
    pub fn from_frames(name: String, frames: Vec<FrameFeatures>, cfg: &PipelineConfig) -> Result<SubjectData> {
        let windows = clip_windows(&frames, cfg)?;
        let starts = cfg.window.starts(frames.len());
        Ok(SubjectData {
            name,
            frames,
            windows,
            starts,
        })
    }
}

/// Renders `windows` windows per subject and runs every frame through the
/// image pipeline.
pub fn synth_subject_data(subject: &SyntheticSubject, windows: usize, cfg: &PipelineConfig) -> Result<SubjectData> {
    let frames = (0..cfg.window.frames_for(windows) as u64)
        .map(|f| {
            let (lm, image) = subject.render(f);
            frame_features(&extract_mouth(&lm), &image, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    SubjectData::from_frames(subject.name.clone(), frames, cfg)
}

pub fn synth_dataset(subjects: usize, windows: usize, seed: u64, cfg: &PipelineConfig) -> Result<Vec<SubjectData>> {
    synth_subjects(subjects, seed)?
        .iter()
        .map(|s| synth_subject_data(s, windows, cfg))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub folds: usize,
    pub seed: u64,
    pub unit: FoldUnit,
    /// Maximum PR points; 0 keeps every distinct score.
    pub pr_steps: usize,
    pub deepfake_alpha: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            folds: 10,
            seed: 7,
            unit: FoldUnit::Window,
            pr_steps: 0,
            deepfake_alpha: 1.0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 3 {
            return Err(Error::InvalidConfig("eval.folds must be at least 3".into()));
        }
        if !(0.0..=1.0).contains(&self.deepfake_alpha) {
            return Err(Error::InvalidConfig("eval.deepfake_alpha must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub metrics: Metrics,
    pub eer: f64,
    pub tau: f64,
    pub attacks: AttackRates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Pooled over all test folds.
    pub metrics: Metrics,
    pub pr_curve: Vec<PrPoint>,
    pub folds: Vec<FoldResult>,
    pub accuracy: Summary,
    pub precision: Option<Summary>,
    pub recall: Option<Summary>,
    pub f1: Option<Summary>,
    pub eer: Summary,
    /// Fold means.
    pub attacks: AttackRates,
}

struct Flat<'a> {
    windows: Vec<&'a RawWindow>,
    labels: Vec<usize>,
    /// (subject, window index within the subject)
    origin: Vec<(usize, usize)>,
}

fn flatten(data: &[SubjectData]) -> Flat<'_> {
    let mut f = Flat {
        windows: Vec::new(),
        labels: Vec::new(),
        origin: Vec::new(),
    };
    for (s, d) in data.iter().enumerate() {
        for (i, w) in d.windows.iter().enumerate() {
            f.windows.push(w);
            f.labels.push(s);
            f.origin.push((s, i));
        }
    }
    f
}

fn gather(flat: &Flat, idx: &[usize]) -> (Vec<RawWindow>, Vec<usize>) {
    (
        idx.iter().map(|&i| flat.windows[i].clone()).collect(),
        idx.iter().map(|&i| flat.labels[i]).collect(),
    )
}

/// k-fold evaluation: per fold, train on k-2 folds, pick the threshold on
/// the validation fold, then verify every test window against every
/// subject's template and run the attack scenarios on the same model.
pub fn cross_validate(
    data: &[SubjectData],
    pipeline: &PipelineConfig,
    train: &TrainConfig,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    cfg.validate()?;
    train.validate()?;
    if data.len() < 2 {
        return Err(Error::InsufficientData {
            subject: "all".into(),
            have: data.len(),
            need: 2,
        });
    }
    let flat = flatten(data);
    let k = cfg.folds;
    let folds = fold_assignment(&flat.labels, k, cfg.seed, cfg.unit).map_err(|e| match e {
        Error::InsufficientData { subject, have, need } => Error::InsufficientData {
            subject: subject
                .parse::<usize>()
                .ok()
                .and_then(|s| data.get(s))
                .map_or(subject, |d| d.name.clone()),
            have,
            need,
        },
        other => other,
    })?;

    let mut pooled = Confusion::default();
    let mut genuine_all = Vec::new();
    let mut impostor_all = Vec::new();
    let mut results = Vec::with_capacity(k);
    for f in 0..k {
        let sp = split(&folds, k, f);
        let (tw, tl) = gather(&flat, &sp.train);
        let fold_train = TrainConfig {
            seed: train.seed.wrapping_add(f as u64),
            ..*train
        };
        let (model, gallery_idx, probe_idx) = match cfg.unit {
            FoldUnit::Window => {
                let (vw, vl) = gather(&flat, &sp.val);
                let model = fit_model_with(&tw, &tl, None, (&vw, &vl), &fold_train)?;
                (model, sp.train.clone(), sp.test.clone())
            }
            FoldUnit::Subject => {
                let (vg, vp) = folds::halves(&sp.val, &flat.labels);
                let (gw, gl) = gather(&flat, &vg);
                let (pw, pl) = gather(&flat, &vp);
                let model = fit_model_with(&tw, &tl, Some((&gw, &gl)), (&pw, &pl), &fold_train)?;
                let (tg, tp) = folds::halves(&sp.test, &flat.labels);
                (model, tg, tp)
            }
        };
        let templates = build_templates(data, &flat, &model, &gallery_idx, f)?;
        let mut conf = Confusion::default();
        let mut genuine = Vec::new();
        let mut impostor = Vec::new();
        for &p in &probe_idx {
            for (s, t) in &templates {
                let d = verify(t, flat.windows[p], &model)?;
                let is_genuine = *s == flat.labels[p];
                conf.add(d.accept, is_genuine);
                if is_genuine {
                    genuine.push(d.score);
                } else {
                    impostor.push(d.score);
                }
            }
        }
        let eer = equal_error_rate(&genuine, &impostor)?;
        let attack = attacks::run_attacks(data, pipeline, &flat_origin(&flat, &probe_idx), &templates, &model, &conf, cfg)?;
        pooled.merge(&conf);
        genuine_all.extend_from_slice(&genuine);
        impostor_all.extend_from_slice(&impostor);
        results.push(FoldResult {
            fold: f,
            metrics: Metrics::from_confusion(conf)?,
            eer,
            tau: model.threshold,
            attacks: attack,
        });
    }

    let steps = (cfg.pr_steps > 0).then_some(cfg.pr_steps);
    let summary = |get: &dyn Fn(&FoldResult) -> Option<f64>| Summary::of(results.iter().map(get));
    let mean = |get: &dyn Fn(&AttackRates) -> f64| results.iter().map(|r| get(&r.attacks)).sum::<f64>() / k as f64;
    Ok(EvalReport {
        metrics: Metrics::from_confusion(pooled)?,
        pr_curve: pr_curve(&genuine_all, &impostor_all, steps)?,
        accuracy: summary(&|r| Some(r.metrics.accuracy)).ok_or(Error::EmptyInput)?,
        precision: summary(&|r| r.metrics.precision),
        recall: summary(&|r| r.metrics.recall),
        f1: summary(&|r| r.metrics.f1),
        eer: summary(&|r| Some(r.eer)).ok_or(Error::EmptyInput)?,
        attacks: AttackRates {
            control: mean(&|a| a.control),
            mimic: mean(&|a| a.mimic),
            static_photo: mean(&|a| a.static_photo),
            deepfake: mean(&|a| a.deepfake),
        },
        folds: results,
    })
}

fn flat_origin(flat: &Flat, idx: &[usize]) -> Vec<(usize, usize)> {
    idx.iter().map(|&i| flat.origin[i]).collect()
}

/// One template per subject present in `gallery_idx`, keyed by subject index.
fn build_templates(
    data: &[SubjectData],
    flat: &Flat,
    model: &Model,
    gallery_idx: &[usize],
    fold: usize,
) -> Result<Vec<(usize, Template)>> {
    let mut out = Vec::new();
    for (s, d) in data.iter().enumerate() {
        let gallery = gallery_idx
            .iter()
            .filter(|&&i| flat.labels[i] == s)
            .map(|&i| model.embed_raw(flat.windows[i]))
            .collect::<Result<Vec<_>>>()?;
        if gallery.is_empty() {
            continue;
        }
        out.push((
            s,
            Template::new(d.name.clone(), gallery, model.threshold, model.version, format!("fold {fold}"))?,
        ));
    }
    Ok(out)
}
