//! Probe files: `"HSPM"`, version byte, 3 zero bytes, `u32` header length,
//! a JSON header with shapes and training config, then every parameter as
//! little-endian `f32` in the order `W1, b1, W2, b2`.

use std::fs;
use std::path::Path;

use hslab_core::{ProbeConfig, ProbeModel};
use serde::{Deserialize, Serialize};

pub const MAGIC: [u8; 4] = *b"HSPM";
pub const VERSION: u8 = 0x01;

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("not a probe file")]
    MagicMismatch,
    #[error("unsupported probe file version {0}")]
    UnsupportedVersion(u8),
    #[error("probe file is truncated")]
    Truncated,
    #[error("probe header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("probe parameters: {0}")]
    Parameters(#[from] hslab_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ModelFileError {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MagicMismatch => "MagicMismatch",
            Self::UnsupportedVersion(_) => "UnsupportedVersion",
            Self::Truncated => "TruncatedFile",
            Self::Header(_) => "InvalidModelHeader",
            Self::Parameters(e) => e.name(),
            Self::Io(_) => "IoFailure",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    input_dim: usize,
    hidden_dim: usize,
    config: ProbeConfig,
}

pub fn encode_model(model: &ProbeModel) -> Vec<u8> {
    let header = serde_json::to_vec(&Header {
        input_dim: model.input_dim(),
        hidden_dim: model.hidden_dim(),
        config: *model.config(),
    })
    .expect("header serializes");
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&[VERSION, 0, 0, 0]);
    out.extend_from_slice(&(header.len() as u32).to_le_bytes());
    out.extend_from_slice(&header);
    for p in model
        .w1()
        .iter()
        .chain(model.b1())
        .chain(model.w2())
        .chain(model.b2())
    {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

pub fn decode_model(bytes: &[u8]) -> Result<ProbeModel, ModelFileError> {
    if bytes.len() < 12 || bytes[..4] != MAGIC {
        return Err(ModelFileError::MagicMismatch);
    }
    if bytes[4] != VERSION {
        return Err(ModelFileError::UnsupportedVersion(bytes[4]));
    }
    let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let rest = &bytes[12..];
    if rest.len() < len {
        return Err(ModelFileError::Truncated);
    }
    let header: Header = serde_json::from_slice(&rest[..len])?;
    let (d, h) = (header.input_dim, header.hidden_dim);
    let params: Vec<f32> = rest[len..]
        .chunks(4)
        .map(|b| b.try_into().map(f32::from_le_bytes))
        .collect::<Result<_, _>>()
        .map_err(|_| ModelFileError::Truncated)?;
    let sizes = [h * d, h, 2 * h, 2];
    if params.len() != sizes.iter().sum::<usize>() {
        return Err(ModelFileError::Truncated);
    }
    let mut it = params.into_iter();
    let mut next = |n: usize| it.by_ref().take(n).collect::<Vec<f32>>();
    let (w1, b1, w2, b2) = (
        next(sizes[0]),
        next(sizes[1]),
        next(sizes[2]),
        next(sizes[3]),
    );
    Ok(ProbeModel::from_parts(d, h, w1, b1, w2, b2, header.config)?)
}

pub fn save_model(model: &ProbeModel, path: impl AsRef<Path>) -> Result<(), ModelFileError> {
    fs::write(path, encode_model(model))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<ProbeModel, ModelFileError> {
    decode_model(&fs::read(path)?)
}
