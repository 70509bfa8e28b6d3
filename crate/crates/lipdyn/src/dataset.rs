//! On-disk datasets: one directory per subject holding `landmarks.lmk.jsonl`
//! and the PNG frames it refers to.

use std::fs;
use std::path::{Path, PathBuf};

use lipdyn_core::eval::{SubjectData, SyntheticSubject};
use lipdyn_core::ingest::extract_mouth;
use lipdyn_core::pipeline::{frame_features, FrameFeatures, PipelineConfig};

use crate::error::{CliError, Result};
use crate::frames::{frame_path, load_rgb, save_rgb};
use crate::landmarks::{parse_landmark_file, write_landmark_file};

pub const LANDMARK_FILE: &str = "landmarks.lmk.jsonl";

/// Frame features for every record of a landmark file, images read from `frames_dir`.
pub fn extract_frames(landmarks: &Path, frames_dir: &Path, cfg: &PipelineConfig) -> Result<Vec<FrameFeatures>> {
    let records = parse_landmark_file(landmarks)?;
    records
        .iter()
        .map(|lm| {
            let path = frame_path(frames_dir, lm);
            let image = load_rgb(&path)?;
            frame_features(&extract_mouth(lm), &image, cfg).map_err(|e| CliError::from(e).at(&path))
        })
        .collect()
}

/// Subject directories under `root`, sorted by name.
pub fn subject_dirs(root: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(root).map_err(|e| CliError::io(root, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(root, e))?;
        let path = entry.path();
        if path.join(LANDMARK_FILE).is_file() {
            out.push((entry.file_name().to_string_lossy().into_owned(), path));
        }
    }
    out.sort();
    if out.is_empty() {
        return Err(CliError::format(root, format!("no subject directory with {LANDMARK_FILE}")));
    }
    Ok(out)
}

pub fn load_dataset(root: &Path, cfg: &PipelineConfig) -> Result<Vec<SubjectData>> {
    subject_dirs(root)?
        .into_iter()
        .map(|(name, dir)| {
            let frames = extract_frames(&dir.join(LANDMARK_FILE), &dir, cfg)?;
            SubjectData::from_frames(name, frames, cfg).map_err(|e| CliError::from(e).at(&dir))
        })
        .collect()
}

/// Renders `frames` frames of every subject under `root`.
pub fn write_synth_dataset(root: &Path, subjects: &[SyntheticSubject], frames: u64) -> Result<()> {
    for s in subjects {
        let dir = root.join(&s.name);
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        let mut records = Vec::with_capacity(frames as usize);
        for f in 0..frames {
            let (lm, image) = s.render(f);
            save_rgb(&frame_path(&dir, &lm), &image)?;
            records.push(lm);
        }
        write_landmark_file(&dir.join(LANDMARK_FILE), &records)?;
    }
    Ok(())
}
