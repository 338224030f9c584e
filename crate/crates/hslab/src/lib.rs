//! File formats, reports and the command-line driver for `hslab-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod hsds;
pub mod model_io;
pub mod pipeline;
pub mod report;
pub mod sweep;

pub use error::{CliError, Result};
pub use hsds::{decode, encode, read_hsds, write_hsds, HsdsError};
pub use model_io::{load_model, save_model};
