//! Model files.
//!
//! Layout: magic `LIPDYNM1`, `u32` format version, `u64` payload length, the
//! postcard-encoded model, then the SHA-256 of the payload. Reals inside the
//! payload are little-endian 64-bit.

use std::path::Path;

use lipdyn_core::verifier::Model;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

const MAGIC: &[u8; 8] = b"LIPDYNM1";
const FORMAT_VERSION: u32 = 1;

pub fn encode_model(model: &Model) -> Vec<u8> {
    let payload = postcard::to_stdvec(model).expect("models serialize");
    let mut out = Vec::with_capacity(payload.len() + 52);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&Sha256::digest(&payload));
    out
}

pub fn decode_model(bytes: &[u8], path: &Path) -> Result<Model> {
    let bad = |m: &str| CliError::format(path, m);
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(bad("not a model file"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(bad(&format!("unsupported model file version {version}")));
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().expect("8 bytes"));
    let rest = &bytes[20..];
    if (rest.len() as u64) != len.saturating_add(32) {
        return Err(bad("model file length does not match its header"));
    }
    let (payload, checksum) = rest.split_at(len as usize);
    if Sha256::digest(payload).as_slice() != checksum {
        return Err(bad("model checksum mismatch"));
    }
    let model: Model = postcard::from_bytes(payload).map_err(|e| bad(&e.to_string()))?;
    if model.version != model.fingerprint() {
        return Err(bad("model version does not match its contents"));
    }
    Ok(model)
}

pub fn save_model(path: &Path, model: &Model) -> Result<()> {
    std::fs::write(path, encode_model(model)).map_err(|e| CliError::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode_model(&bytes, path)
}
