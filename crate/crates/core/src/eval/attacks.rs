//! Mimic, static-photo and deepfake-proxy attack scenarios.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Confusion, EvalConfig, SubjectData};
use crate::error::{Error, Result};
use crate::pipeline::{window_features, FrameFeatures, PipelineConfig, RawWindow};
use crate::verifier::{verify, Model, Template};

/// Success rates per scenario; `control` is the genuine accept rate the
/// attacks are read against.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AttackRates {
    pub control: f64,
    pub mimic: f64,
    pub static_photo: f64,
    pub deepfake: f64,
}

/// A window made of one frame held still for the whole window length.
pub fn static_photo_window(frame: &FrameFeatures, cfg: &PipelineConfig) -> Result<RawWindow> {
    window_features(&vec![frame.clone(); cfg.window.length], cfg)
}

/// The target's static and texture blocks with its lip-print and articulator
/// blocks moved toward the attacker's by `alpha`.
pub fn blend_windows(target: &RawWindow, attacker: &RawWindow, alpha: f64) -> RawWindow {
    let mix = |t: &[f64], a: &[f64]| -> Vec<f64> {
        t.iter().zip(a).map(|(t, a)| (1.0 - alpha) * t + alpha * a).collect()
    };
    let lip_present = if alpha == 0.0 {
        target.present[2]
    } else if alpha == 1.0 {
        attacker.present[2]
    } else {
        target.present[2] && attacker.present[2]
    };
    RawWindow {
        static_block: target.static_block.clone(),
        texture_raw: target.texture_raw.clone(),
        lipprint: mix(&target.lipprint, &attacker.lipprint),
        articulator: mix(&target.articulator, &attacker.articulator),
        present: [target.present[0], target.present[1], lip_present, target.present[3]],
    }
}

fn rate(accepted: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        accepted as f64 / total as f64
    }
}

/// Runs every scenario on the test probes of one fold.
/// `probes` holds (subject, window index) pairs.
pub(crate) fn run_attacks(
    data: &[SubjectData],
    pipeline: &PipelineConfig,
    probes: &[(usize, usize)],
    templates: &[(usize, Template)],
    model: &Model,
    conf: &Confusion,
    cfg: &EvalConfig,
) -> Result<AttackRates> {
    let template = |s: usize| templates.iter().find(|(t, _)| *t == s).map(|(_, t)| t);
    let mut own: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(s, i) in probes {
        if template(s).is_some() {
            own.entry(s).or_default().push(i);
        }
    }
    let subjects: Vec<usize> = own.keys().copied().collect();
    if subjects.len() < 2 {
        return Err(Error::InsufficientData {
            subject: "all".into(),
            have: subjects.len(),
            need: 2,
        });
    }

    let mut static_hits = 0;
    let mut fake_hits = 0;
    let mut total = 0;
    for (pos, &s) in subjects.iter().enumerate() {
        let t = template(s).expect("subject has a template");
        let attacker = subjects[(pos + 1) % subjects.len()];
        let theirs = &own[&attacker];
        for (j, &i) in own[&s].iter().enumerate() {
            let d = &data[s];
            let still = static_photo_window(&d.frames[d.starts[i]], pipeline)?;
            static_hits += verify(t, &still, model)?.accept as usize;
            let fake = blend_windows(
                &d.windows[i],
                &data[attacker].windows[theirs[j % theirs.len()]],
                cfg.deepfake_alpha,
            );
            fake_hits += verify(t, &fake, model)?.accept as usize;
            total += 1;
        }
    }
    Ok(AttackRates {
        control: conf.recall().unwrap_or(0.0),
        mimic: conf.false_accept_rate().unwrap_or(0.0),
        static_photo: rate(static_hits, total),
        deepfake: rate(fake_hits, total),
    })
}
