//! HSDS: a small little-endian container for one labeled activation matrix.
//!
//! ```text
//! 0   "HSDS"
//! 4   version (0x01), then 3 zero bytes
//! 8   u64 M, u64 d
//! 24  u32 L, then L bytes of UTF-8 JSON metadata
//!     M label bytes (0 or 1)
//!     u8 has_pairs; when 1, M x u32 pair ids
//!     M*d x f32 activations, row-major
//! ```
//!
//! Metadata is written as compact JSON with sorted keys, so any file this
//! module writes is reproduced byte for byte by a read followed by a write.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use hslab_core::{LabeledMatrix, Matrix};

pub const MAGIC: [u8; 4] = *b"HSDS";
pub const VERSION: u8 = 0x01;

#[derive(Debug, thiserror::Error)]
pub enum HsdsError {
    #[error("bad magic bytes {found:?}, expected \"HSDS\"")]
    MagicMismatch { found: Vec<u8> },
    #[error("unsupported HSDS version {version}")]
    UnsupportedVersion { version: u8 },
    #[error("non-zero padding byte at offset {offset}")]
    NonZeroPadding { offset: usize },
    #[error("file ends at byte {len}, but {needed} more bytes are needed at offset {offset}")]
    TruncatedFile {
        offset: usize,
        needed: usize,
        len: usize,
    },
    #[error("header declares an empty matrix ({rows} x {cols})")]
    EmptyMatrix { rows: u64, cols: u64 },
    #[error("metadata at offset {offset} is not a flat JSON object: {reason}")]
    InvalidMetadata { offset: usize, reason: String },
    #[error("label {value} at offset {offset} is not 0 or 1")]
    LabelOutOfRange { offset: usize, value: u8 },
    #[error("has_pairs flag {value} at offset {offset} is not 0 or 1")]
    InvalidPairFlag { offset: usize, value: u8 },
    #[error("non-finite activation at offset {offset}")]
    NonFiniteValue { offset: usize },
    #[error("{extra} unexpected bytes after the payload at offset {offset}")]
    TrailingData { offset: usize, extra: usize },
    #[error("metadata does not fit in a u32 length field")]
    MetadataTooLarge,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HsdsError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MagicMismatch { .. } => "MagicMismatch",
            Self::UnsupportedVersion { .. } => "UnsupportedVersion",
            Self::NonZeroPadding { .. } => "NonZeroPadding",
            Self::TruncatedFile { .. } => "TruncatedFile",
            Self::EmptyMatrix { .. } => "EmptyMatrix",
            Self::InvalidMetadata { .. } => "InvalidMetadata",
            Self::LabelOutOfRange { .. } => "LabelOutOfRange",
            Self::InvalidPairFlag { .. } => "InvalidPairFlag",
            Self::NonFiniteValue { .. } => "NonFiniteValue",
            Self::TrailingData { .. } => "TrailingData",
            Self::MetadataTooLarge => "MetadataTooLarge",
            Self::Io(_) => "IoFailure",
        }
    }
}

/// Bounds-checked forward reader over the file bytes.
struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], HsdsError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else {
            return Err(HsdsError::TruncatedFile {
                offset: self.pos,
                needed: n,
                len: self.bytes.len(),
            });
        };
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, HsdsError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, HsdsError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, HsdsError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// Checks that `count` items of `width` bytes remain before reading them.
    fn take_array(&mut self, count: u64, width: usize) -> Result<&'a [u8], HsdsError> {
        let n = usize::try_from(count)
            .ok()
            .and_then(|c| c.checked_mul(width))
            .unwrap_or(usize::MAX);
        self.take(n)
    }
}

fn parse_metadata(raw: &[u8], offset: usize) -> Result<BTreeMap<String, String>, HsdsError> {
    let invalid = |reason: String| HsdsError::InvalidMetadata { offset, reason };
    let value: serde_json::Value =
        serde_json::from_slice(raw).map_err(|e| invalid(e.to_string()))?;
    let serde_json::Value::Object(map) = value else {
        return Err(invalid("top level is not an object".into()));
    };
    Ok(map
        .into_iter()
        .map(|(k, v)| {
            let v = match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            (k, v)
        })
        .collect())
}

/// Parses a complete HSDS byte buffer.
pub fn decode(bytes: &[u8]) -> Result<LabeledMatrix, HsdsError> {
    let mut c = Cursor { bytes, pos: 0 };
    let magic = c.take(4).map_err(|_| HsdsError::MagicMismatch {
        found: bytes[..bytes.len().min(4)].to_vec(),
    })?;
    if magic != MAGIC {
        return Err(HsdsError::MagicMismatch {
            found: magic.to_vec(),
        });
    }
    let version = c.u8()?;
    if version != VERSION {
        return Err(HsdsError::UnsupportedVersion { version });
    }
    for _ in 0..3 {
        let offset = c.pos;
        if c.u8()? != 0 {
            return Err(HsdsError::NonZeroPadding { offset });
        }
    }
    let rows = c.u64()?;
    let cols = c.u64()?;
    if rows == 0 || cols == 0 {
        return Err(HsdsError::EmptyMatrix { rows, cols });
    }
    let meta_len = c.u32()?;
    let meta_offset = c.pos;
    let meta = parse_metadata(c.take(meta_len as usize)?, meta_offset)?;

    let label_offset = c.pos;
    let labels = c.take_array(rows, 1)?.to_vec();
    if let Some(i) = labels.iter().position(|&l| l > 1) {
        return Err(HsdsError::LabelOutOfRange {
            offset: label_offset + i,
            value: labels[i],
        });
    }

    let flag_offset = c.pos;
    let pair_ids = match c.u8()? {
        0 => None,
        1 => Some(
            c.take_array(rows, 4)?
                .chunks_exact(4)
                .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
                .collect(),
        ),
        value => {
            return Err(HsdsError::InvalidPairFlag {
                offset: flag_offset,
                value,
            })
        }
    };

    let data_offset = c.pos;
    let cells = rows.saturating_mul(cols);
    let raw = c.take_array(cells, 4)?;
    let mut data = Vec::with_capacity(raw.len() / 4);
    for (i, b) in raw.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(b.try_into().unwrap());
        if !v.is_finite() {
            return Err(HsdsError::NonFiniteValue {
                offset: data_offset + 4 * i,
            });
        }
        data.push(v);
    }
    if c.pos != bytes.len() {
        return Err(HsdsError::TrailingData {
            offset: c.pos,
            extra: bytes.len() - c.pos,
        });
    }
    // Every invariant was checked above; a failure here is a bug.
    let matrix = Matrix::new(rows as usize, cols as usize, data).expect("validated shape");
    Ok(LabeledMatrix::new(matrix, labels, pair_ids, meta).expect("validated matrix"))
}

/// Serializes `m`; the output always decodes back to an equal matrix.
pub fn encode(m: &LabeledMatrix) -> Result<Vec<u8>, HsdsError> {
    let meta = serde_json::to_vec(m.meta()).expect("string map serializes");
    let meta_len = u32::try_from(meta.len()).map_err(|_| HsdsError::MetadataTooLarge)?;
    let (rows, cols) = (m.rows(), m.cols());
    let pairs = m.pair_ids();
    let mut out = Vec::with_capacity(
        29 + meta.len() + rows + pairs.map_or(0, |_| 4 * rows) + 4 * rows * cols,
    );
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&[VERSION, 0, 0, 0]);
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(cols as u64).to_le_bytes());
    out.extend_from_slice(&meta_len.to_le_bytes());
    out.extend_from_slice(&meta);
    out.extend_from_slice(m.labels());
    match pairs {
        Some(ids) => {
            out.push(1);
            for id in ids {
                out.extend_from_slice(&id.to_le_bytes());
            }
        }
        None => out.push(0),
    }
    for v in m.data().as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn read_hsds(path: impl AsRef<Path>) -> Result<LabeledMatrix, HsdsError> {
    decode(&fs::read(path)?)
}

pub fn write_hsds(m: &LabeledMatrix, path: impl AsRef<Path>) -> Result<(), HsdsError> {
    fs::write(path, encode(m)?)?;
    Ok(())
}
