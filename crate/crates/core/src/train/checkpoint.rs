//! Binary checkpoint format.
//!
//! ```text
//! u64 LE     header length n
//! n bytes    UTF-8 JSON {format_version, k, n_entities, n_relations, mode, seed}
//! f64 LE...  entities, rel_translate, rel_rotate
//! ```
//!
//! Each table is row-major and each row holds its eight part arrays in the
//! order `w_r, w_i, x_r, x_i, y_r, y_i, z_r, z_i`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EmbeddingTable, Mode, ModelParameters, PARTS};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("corrupt checkpoint header: {0}")]
    CorruptHeader(String),
    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    FormatVersionMismatch { found: u32, expected: u32 },
    #[error("checkpoint holds {found} parameter bytes but its header implies {expected}")]
    LayoutMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub k: usize,
    pub n_entities: usize,
    pub n_relations: usize,
    pub mode: Mode,
    pub seed: u64,
}

/// Serializes parameters to checkpoint bytes.
pub fn to_bytes(params: &ModelParameters) -> Vec<u8> {
    let header = CheckpointHeader {
        format_version: FORMAT_VERSION,
        k: params.k(),
        n_entities: params.n_entities(),
        n_relations: params.n_relations(),
        mode: params.mode,
        seed: params.seed,
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let n_floats: usize = params.tables().iter().map(|t| t.as_slice().len()).sum();
    let mut out = Vec::with_capacity(8 + json.len() + 8 * n_floats);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for t in params.tables() {
        for v in t.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Parses checkpoint bytes.
pub fn from_bytes(bytes: &[u8]) -> Result<ModelParameters, CheckpointError> {
    let corrupt = |m: String| CheckpointError::CorruptHeader(m);
    let len_bytes: [u8; 8] = bytes
        .get(..8)
        .ok_or_else(|| corrupt(format!("file is {} bytes, shorter than the length prefix", bytes.len())))?
        .try_into()
        .expect("8 bytes");
    let n = usize::try_from(u64::from_le_bytes(len_bytes)).map_err(|e| corrupt(e.to_string()))?;
    let json = bytes
        .get(8..8usize.saturating_add(n))
        .ok_or_else(|| corrupt(format!("header length {n} exceeds file size {}", bytes.len())))?;
    let header: CheckpointHeader = serde_json::from_slice(json).map_err(|e| corrupt(e.to_string()))?;
    if header.format_version != FORMAT_VERSION {
        return Err(CheckpointError::FormatVersionMismatch {
            found: header.format_version,
            expected: FORMAT_VERSION,
        });
    }

    let data = &bytes[8 + n..];
    let width = PARTS * header.k;
    let rows = [header.n_entities, header.n_relations, header.n_relations];
    let expected = rows
        .iter()
        .try_fold(0usize, |acc, r| r.checked_mul(width)?.checked_mul(8)?.checked_add(acc))
        .ok_or_else(|| corrupt("header dimensions overflow".into()))?;
    if data.len() != expected {
        return Err(CheckpointError::LayoutMismatch { expected, found: data.len() });
    }

    let mut floats = data.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    let mut table = |r: usize| {
        let v: Vec<f64> = floats.by_ref().take(r * width).collect();
        EmbeddingTable::from_data(r, header.k, v).expect("length checked above")
    };
    let entities = table(header.n_entities);
    let rel_translate = table(header.n_relations);
    let rel_rotate = table(header.n_relations);
    Ok(ModelParameters { mode: header.mode, seed: header.seed, entities, rel_translate, rel_rotate })
}

pub fn save_checkpoint(params: &ModelParameters, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
    let path = path.as_ref();
    fs::write(path, to_bytes(params))
        .map_err(|source| CheckpointError::Io { path: path.display().to_string(), source })
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<ModelParameters, CheckpointError> {
    let path = path.as_ref();
    let bytes =
        fs::read(path).map_err(|source| CheckpointError::Io { path: path.display().to_string(), source })?;
    from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParameters {
        ModelParameters::init(5, 4, 2, Mode::NormBiquat, 77)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let p = params();
        let bytes = to_bytes(&p);
        let q = from_bytes(&bytes).unwrap();
        assert_eq!(p, q);
        assert_eq!(to_bytes(&q), bytes);
    }

    #[test]
    fn layout() {
        let p = params();
        let bytes = to_bytes(&p);
        let n = u64::from_le_bytes(bytes[..8].try_into().unwrap()) as usize;
        let header: serde_json::Value = serde_json::from_slice(&bytes[8..8 + n]).unwrap();
        assert_eq!(header["mode"], "norm_biquat");
        assert_eq!(header["k"], 2);
        let first = f64::from_le_bytes(bytes[8 + n..16 + n].try_into().unwrap());
        assert_eq!(first, p.entities.row(0)[0]);
        assert_eq!(bytes.len(), 8 + n + 8 * 16 * (5 + 4 + 4));
    }

    #[test]
    fn truncation_is_corrupt_header() {
        let bytes = to_bytes(&params());
        for cut in [0, 5, 8, 20] {
            assert!(matches!(from_bytes(&bytes[..cut]), Err(CheckpointError::CorruptHeader(_))), "cut {cut}");
        }
    }

    #[test]
    fn wrong_version() {
        let mut p = to_bytes(&params());
        let n = u64::from_le_bytes(p[..8].try_into().unwrap()) as usize;
        let text = String::from_utf8(p[8..8 + n].to_vec()).unwrap().replace("\"format_version\":1", "\"format_version\":7");
        p.splice(8..8 + n, text.into_bytes());
        assert!(matches!(from_bytes(&p), Err(CheckpointError::FormatVersionMismatch { found: 7, .. })));
    }
}
