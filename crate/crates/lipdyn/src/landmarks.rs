//! `.lmk.jsonl` landmark files: one JSON object per line with keys `frame`,
//! `t_ms`, `pts` (68 `[x, y]` pairs) and an optional `img`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use lipdyn_core::error::Error as CoreError;
use lipdyn_core::geom::Point;
use lipdyn_core::ingest::{order_frames, LandmarkFrame};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    frame: u64,
    t_ms: f64,
    pts: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    img: Option<String>,
}

fn malformed(line: usize, reason: impl Into<String>) -> CoreError {
    CoreError::MalformedRecord {
        line,
        reason: reason.into(),
    }
}

/// Parses records from `reader`, sorted by frame index. Lines are numbered
/// from 1; blank lines are skipped.
pub fn parse_landmarks(reader: impl BufRead) -> std::result::Result<Vec<LandmarkFrame>, LandmarkReadError> {
    let mut frames = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let number = i + 1;
        let line = line.map_err(LandmarkReadError::Io)?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line).map_err(|e| malformed(number, e.to_string()))?;
        let points = rec.pts.iter().map(|&[x, y]| Point::new(x, y)).collect();
        let frame = LandmarkFrame::new(rec.frame, rec.t_ms, points, rec.img).map_err(|r| malformed(number, r))?;
        frames.push((number, frame));
    }
    Ok(order_frames(frames)?)
}

#[derive(Debug, thiserror::Error)]
pub enum LandmarkReadError {
    #[error(transparent)]
    Io(std::io::Error),
    #[error(transparent)]
    Record(#[from] CoreError),
}

pub fn parse_landmark_file(path: &Path) -> Result<Vec<LandmarkFrame>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_landmarks(BufReader::new(file)).map_err(|e| match e {
        LandmarkReadError::Io(e) => CliError::io(path, e),
        LandmarkReadError::Record(e) => CliError::from(e).at(path),
    })
}

pub fn write_landmarks(mut out: impl Write, frames: &[LandmarkFrame]) -> std::io::Result<()> {
    for f in frames {
        let rec = Record {
            frame: f.frame_index,
            t_ms: f.timestamp_ms,
            pts: f.points().iter().map(|p| [p.x, p.y]).collect(),
            img: f.image_ref.clone(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_landmark_file(path: &Path, frames: &[LandmarkFrame]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_landmarks(&mut w, frames)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}
