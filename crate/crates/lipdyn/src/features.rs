//! Feature window files.
//!
//! Layout, all little-endian: magic `LIPDYNF1`, `u32` format version,
//! `u64` dimension, `u64` row count, `u64` model version (0 for raw windows
//! that no model has touched), then the rows as `f64`, row-major.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use lipdyn_core::pipeline::{RawWindow, RAW_DIM};

use crate::error::{CliError, Result};

const MAGIC: &[u8; 8] = b"LIPDYNF1";
const FORMAT_VERSION: u32 = 1;
/// Raw window rows: every block plus the four presence flags.
pub const WINDOW_ROW: usize = RAW_DIM + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureHeader {
    pub dim: u64,
    pub count: u64,
    pub model_version: u64,
}

pub fn write_features(out: &mut impl Write, header: FeatureHeader, rows: &[Vec<f64>]) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    for v in [header.dim, header.count, header.model_version] {
        out.write_all(&v.to_le_bytes())?;
    }
    for row in rows {
        assert_eq!(row.len() as u64, header.dim, "row width must match the header");
        for v in row {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn write_window_file(path: &Path, windows: &[RawWindow]) -> Result<()> {
    let rows: Vec<Vec<f64>> = windows.iter().map(RawWindow::to_vec).collect();
    let header = FeatureHeader {
        dim: WINDOW_ROW as u64,
        count: rows.len() as u64,
        model_version: 0,
    };
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_features(&mut w, header, &rows)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

/// Streams rows one at a time.
pub struct FeatureReader<R> {
    pub header: FeatureHeader,
    input: R,
    read: u64,
    path: PathBuf,
}

impl FeatureReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        FeatureReader::new(BufReader::new(file), path)
    }
}

impl<R: Read> FeatureReader<R> {
    pub fn new(mut input: R, path: &Path) -> Result<Self> {
        let bad = |m: &str| CliError::format(path, m);
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
        if &magic != MAGIC {
            return Err(bad("not a feature file"));
        }
        let mut b4 = [0u8; 4];
        input.read_exact(&mut b4).map_err(|_| bad("truncated header"))?;
        let version = u32::from_le_bytes(b4);
        if version != FORMAT_VERSION {
            return Err(bad(&format!("unsupported feature file version {version}")));
        }
        let mut fields = [0u64; 3];
        for f in fields.iter_mut() {
            let mut b8 = [0u8; 8];
            input.read_exact(&mut b8).map_err(|_| bad("truncated header"))?;
            *f = u64::from_le_bytes(b8);
        }
        if fields[0] == 0 {
            return Err(bad("zero dimension"));
        }
        Ok(FeatureReader {
            header: FeatureHeader {
                dim: fields[0],
                count: fields[1],
                model_version: fields[2],
            },
            input,
            read: 0,
            path: path.to_path_buf(),
        })
    }
}

impl<R: Read> Iterator for FeatureReader<R> {
    type Item = Result<Vec<f64>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.read == self.header.count {
            let mut extra = [0u8; 1];
            return match self.input.read(&mut extra) {
                Ok(0) => None,
                Ok(_) => {
                    self.read += 1;
                    Some(Err(CliError::format(&self.path, "trailing bytes after the last row")))
                }
                Err(e) => Some(Err(CliError::io(&self.path, e))),
            };
        }
        if self.read > self.header.count {
            return None;
        }
        let mut buf = vec![0u8; 8 * self.header.dim as usize];
        self.read += 1;
        if self.input.read_exact(&mut buf).is_err() {
            self.read = self.header.count + 1;
            return Some(Err(CliError::format(
                &self.path,
                format!("truncated at row {} of {}", self.read - 1, self.header.count),
            )));
        }
        Some(Ok(buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect()))
    }
}

/// Raw windows of one file, validated against the window layout.
pub fn read_window_file(path: &Path) -> Result<Vec<RawWindow>> {
    let reader = FeatureReader::open(path)?;
    check_window_header(&reader.header, path)?;
    reader
        .map(|row| row.and_then(|r| RawWindow::from_slice(&r).map_err(|e| CliError::from(e).at(path))))
        .collect()
}

pub fn check_window_header(h: &FeatureHeader, path: &Path) -> Result<()> {
    if h.dim != WINDOW_ROW as u64 {
        return Err(CliError::format(
            path,
            format!("rows have {} values, raw windows have {WINDOW_ROW}", h.dim),
        ));
    }
    Ok(())
}
