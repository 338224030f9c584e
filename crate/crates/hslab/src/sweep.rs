//! Loading a set of layer files and scoring each with S-CDI.

use std::path::{Path, PathBuf};

use hslab_core::{scdi, LabeledMatrix, ScdiConfig, ScdiReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::hsds::read_hsds;

#[derive(Debug, Clone)]
pub struct Layer {
    pub index: usize,
    pub path: PathBuf,
    pub data: LabeledMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerReport {
    pub layer: usize,
    pub path: String,
    pub report: ScdiReport,
}

fn layer_index(m: &LabeledMatrix) -> Result<Option<usize>> {
    match m.meta().get("layer") {
        None => Ok(None),
        Some(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::InvalidLayerIndex(v.clone())),
    }
}

/// Loads every file in parallel and orders them by the `layer` metadata
/// entry. When no file carries one, argument order is used instead.
pub fn load_layers(paths: &[PathBuf]) -> Result<Vec<Layer>> {
    let loaded: Vec<(PathBuf, LabeledMatrix, Option<usize>)> = paths
        .par_iter()
        .map(|p| {
            let m = read_hsds(p).map_err(|e| CliError::from(e).at(p))?;
            let idx = layer_index(&m).map_err(|e| e.at(p))?;
            Ok((p.clone(), m, idx))
        })
        .collect::<Result<_>>()?;

    let indexed = loaded.iter().filter(|(_, _, i)| i.is_some()).count();
    let mut layers: Vec<Layer> = if indexed == 0 {
        loaded
            .into_iter()
            .enumerate()
            .map(|(index, (path, data, _))| Layer { index, path, data })
            .collect()
    } else {
        loaded
            .into_iter()
            .map(|(path, data, idx)| match idx {
                Some(index) => Ok(Layer { index, path, data }),
                None => Err(CliError::MissingLayerIndex.at(&path)),
            })
            .collect::<Result<_>>()?
    };
    layers.sort_by_key(|l| l.index);
    if let Some(w) = layers.windows(2).find(|w| w[0].index == w[1].index) {
        return Err(CliError::DuplicateLayer {
            layer: w[0].index,
            first: w[0].path.display().to_string(),
            second: w[1].path.display().to_string(),
        });
    }
    Ok(layers)
}

/// One report per layer, all computed with the same configuration (and
/// therefore the same sampling seed).
pub fn score_layers(layers: &[Layer], cfg: &ScdiConfig) -> Result<Vec<LayerReport>> {
    layers
        .par_iter()
        .map(|l| {
            let report = scdi(&l.data, cfg).map_err(|e| CliError::from(e).at(&l.path))?;
            Ok(LayerReport {
                layer: l.index,
                path: l.path.display().to_string(),
                report,
            })
        })
        .collect()
}

pub fn scdi_sweep(paths: &[PathBuf], cfg: &ScdiConfig) -> Result<Vec<LayerReport>> {
    score_layers(&load_layers(paths)?, cfg)
}

/// Index into `reports` of the lowest S-CDI; ties go to the earlier layer.
pub fn argmin_layer(reports: &[LayerReport]) -> Option<usize> {
    (0..reports.len()).min_by(|&a, &b| reports[a].report.scdi.total_cmp(&reports[b].report.scdi))
}

pub fn display(p: &Path) -> String {
    p.display().to_string()
}
