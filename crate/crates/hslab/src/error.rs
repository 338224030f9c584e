use std::path::PathBuf;

use crate::hsds::HsdsError;
use crate::model_io::ModelFileError;

/// Everything a command can fail with. Usage and configuration problems exit
/// with status 2, data and contract errors with status 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] hslab_core::Error),
    #[error(transparent)]
    Hsds(#[from] HsdsError),
    #[error(transparent)]
    Model(#[from] ModelFileError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}: {message}", path.display())]
    InvalidReport { path: PathBuf, message: String },
    #[error("layer {layer} appears in both {first} and {second}")]
    DuplicateLayer {
        layer: usize,
        first: String,
        second: String,
    },
    #[error("metadata has no \"layer\" entry")]
    MissingLayerIndex,
    #[error("metadata layer {0:?} is not an unsigned integer")]
    InvalidLayerIndex(String),
    #[error("{}: {source}", path.display())]
    AtPath {
        path: PathBuf,
        source: Box<CliError>,
    },
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<CliError>,
    },
}

impl CliError {
    /// Stable identifier printed on standard error.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Usage(_) => "UsageError",
            Self::Config { .. } => "ConfigError",
            Self::Core(e) => e.name(),
            Self::Hsds(e) => e.name(),
            Self::Model(e) => e.name(),
            Self::Io { .. } => "IoFailure",
            Self::Json { .. } => "InvalidJson",
            Self::Csv { .. } => "IoFailure",
            Self::InvalidReport { .. } => "InvalidReport",
            Self::DuplicateLayer { .. } => "DuplicateLayer",
            Self::MissingLayerIndex => "MissingLayerIndex",
            Self::InvalidLayerIndex(_) => "InvalidLayerIndex",
            Self::AtPath { source, .. } | Self::Stage { source, .. } => source.name(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config { .. } => 2,
            Self::AtPath { source, .. } | Self::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }

    pub fn at(self, path: impl Into<PathBuf>) -> Self {
        Self::AtPath {
            path: path.into(),
            source: Box::new(self),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Self::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Tags the error of a fallible step with a pipeline stage name.
pub trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T, E: Into<CliError>> StageExt<T> for std::result::Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.into().in_stage(stage))
    }
}
