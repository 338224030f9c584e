//! Labeled matrices with planted, known structure.
//!
//! Rows come in adjacent pairs: row `2i` is a regret row (label 1), row
//! `2i + 1` its non-regret partner (label 0), both with pair id `i`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LabeledMatrix, Matrix, NeuronSet};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlantSpec {
    /// Even, at least 2.
    pub m_rows: usize,
    pub d_dims: usize,
    /// Distance between the two class means on every planted column, in
    /// units of `noise_sigma`.
    pub class_gap: f64,
    pub noise_sigma: f64,
    pub signal_idx: Vec<usize>,
    /// Each signal column is copied onto `redundancy - 1` extra columns.
    pub redundancy: usize,
    /// Layer series only: plant with [`gen_compositional`], splitting
    /// `signal_idx` into two halves.
    pub compositional: bool,
    /// Added to every activation; raises all pairwise cosine similarities.
    pub common_offset: f64,
    /// Midpoint between the class means on planted columns.
    pub planted_center: f64,
    pub seed: u64,
}

impl Default for PlantSpec {
    fn default() -> Self {
        Self {
            m_rows: 200,
            d_dims: 16,
            class_gap: 4.0,
            noise_sigma: 1.0,
            signal_idx: (0..4).collect(),
            redundancy: 1,
            compositional: false,
            common_offset: 0.0,
            planted_center: 0.0,
            seed: 0,
        }
    }
}

impl PlantSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.m_rows < 2 || self.m_rows % 2 != 0 {
            return bad(format!("m_rows must be even and >= 2, got {}", self.m_rows));
        }
        if self.d_dims == 0 {
            return bad("d_dims must be at least 1".to_string());
        }
        if !(self.class_gap >= 0.0 && self.class_gap.is_finite()) {
            return bad(format!("class_gap must be >= 0, got {}", self.class_gap));
        }
        if !(self.noise_sigma > 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be > 0, got {}", self.noise_sigma));
        }
        if self.redundancy == 0 {
            return bad("redundancy must be at least 1".to_string());
        }
        NeuronSet::from(self.signal_idx.clone()).check_bounds(self.d_dims)
    }

    /// Signal columns plus their replicas, which fill the lowest free
    /// indices in order.
    pub fn planted_columns(&self) -> Result<NeuronSet> {
        let signal = NeuronSet::from(self.signal_idx.clone());
        signal.check_bounds(self.d_dims)?;
        let extra = signal.len() * (self.redundancy.max(1) - 1);
        let replicas: Vec<usize> = (0..self.d_dims)
            .filter(|&j| !signal.contains(j))
            .take(extra)
            .collect();
        if replicas.len() < extra {
            return Err(Error::CountExceedsDimension {
                count: signal.len() + extra,
                dim: self.d_dims,
            });
        }
        Ok(signal.union(&NeuronSet::from(replicas)))
    }

    fn half_gap(&self) -> f64 {
        self.class_gap * self.noise_sigma / 2.0
    }
}

fn paired_labels(m: usize) -> (Vec<u8>, Vec<u32>) {
    let labels = (0..m).map(|i| u8::from(i % 2 == 0)).collect();
    let ids = (0..m).map(|i| (i / 2) as u32).collect();
    (labels, ids)
}

fn assemble(
    spec: &PlantSpec,
    kind: &str,
    mut mean_of: impl FnMut(u8, usize) -> f64,
) -> Result<LabeledMatrix> {
    let noise =
        Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut rng = seed::rng(spec.seed);
    let (m, d) = (spec.m_rows, spec.d_dims);
    let (labels, ids) = paired_labels(m);
    let mut data = Vec::with_capacity(m * d);
    for &label in &labels {
        for j in 0..d {
            let v = spec.common_offset + mean_of(label, j) + noise.sample(&mut rng);
            data.push(v as f32);
        }
    }
    let mut meta = BTreeMap::new();
    meta.insert("source".to_string(), format!("synthetic:{kind}"));
    LabeledMatrix::new(Matrix::new(m, d, data)?, labels, Some(ids), meta)
}

/// Two Gaussian classes whose means differ only on the planted columns:
/// `planted_center ± class_gap·σ/2` there (label 1 on the `+` side), `0`
/// elsewhere, plus isotropic noise and `common_offset`.
pub fn gen_clusters(spec: &PlantSpec) -> Result<LabeledMatrix> {
    spec.validate()?;
    let planted = spec.planted_columns()?;
    let g = spec.half_gap();
    let c = spec.planted_center;
    assemble(spec, "clusters", |label, j| {
        if planted.contains(j) {
            if label == 1 {
                c + g
            } else {
                c - g
            }
        } else {
            0.0
        }
    })
}

/// Two disjoint groups that each encode the label on their own, so the
/// label survives deactivating either group and is lost only when both go.
///
/// Group `a` puts regret rows at `planted_center - class_gap·σ/2` and
/// non-regret rows at `planted_center + class_gap·σ/2`; group `b` uses the
/// opposite sides. All other columns are label-independent noise. With the
/// center at the deactivation value, overwriting one group leaves that group
/// at its decision midpoint and the other group still decisive.
pub fn gen_compositional(spec: &PlantSpec, a: &NeuronSet, b: &NeuronSet) -> Result<LabeledMatrix> {
    spec.validate()?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyGroup);
    }
    a.check_bounds(spec.d_dims)?;
    b.check_bounds(spec.d_dims)?;
    if let Some(index) = a.first_shared(b) {
        return Err(Error::OverlappingGroups { index });
    }
    let g = spec.half_gap();
    let c = spec.planted_center;
    assemble(spec, "compositional", |label, j| {
        let side = if label == 1 { 1.0 } else { -1.0 };
        if a.contains(j) {
            c - side * g
        } else if b.contains(j) {
            c + side * g
        } else {
            0.0
        }
    })
}

/// The two halves of `signal_idx` used when `compositional` is set.
pub fn compositional_groups(spec: &PlantSpec) -> Result<(NeuronSet, NeuronSet)> {
    let signal = NeuronSet::from(spec.signal_idx.clone());
    if signal.len() < 2 {
        return Err(Error::InvalidConfig(
            "compositional planting needs at least two signal columns".into(),
        ));
    }
    let (a, b) = signal.as_slice().split_at(signal.len() / 2);
    Ok((NeuronSet::from(a.to_vec()), NeuronSet::from(b.to_vec())))
}

/// A separable layer and an entangled layer (same spec with `class_gap = 0`)
/// drawn from independent seeds.
pub fn separable_entangled_pair(spec: &PlantSpec) -> Result<(LabeledMatrix, LabeledMatrix)> {
    let separable = gen_clusters(&PlantSpec {
        seed: seed::derive_seed(spec.seed, "separable"),
        ..spec.clone()
    })?;
    let entangled = gen_clusters(&PlantSpec {
        class_gap: 0.0,
        seed: seed::derive_seed(spec.seed, "entangled"),
        ..spec.clone()
    })?;
    Ok((separable, entangled))
}

/// What a layer series was built to show.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSeriesTruth {
    /// Requested S-CDI rank per layer (0 = lowest).
    pub ranks: Vec<usize>,
    pub offsets: Vec<f64>,
    /// Layer holding the lowest requested rank.
    pub planted_layer: usize,
    /// Sign of each consecutive rank difference (+1 rising, -1 falling).
    pub expected_trend: Vec<i8>,
    pub class_gap: f64,
    pub compositional: bool,
    pub group_a: Option<NeuronSet>,
    pub group_b: Option<NeuronSet>,
}

/// One matrix per layer whose S-CDI ordering follows `ranks`.
///
/// The knob is `common_offset`: a larger shared offset raises every cosine
/// similarity and so raises S-CDI without touching column correlations.
/// Layer `l` gets offset `base.common_offset + ranks[l] * offset_step` and
/// an independent seed; its metadata records `layer = l`.
pub fn gen_layer_series(
    ranks: &[usize],
    base: &PlantSpec,
    offset_step: f64,
) -> Result<(Vec<LabeledMatrix>, LayerSeriesTruth)> {
    if ranks.is_empty() {
        return Err(Error::InvalidConfig(
            "layer series needs at least one layer".into(),
        ));
    }
    if !(offset_step > 0.0 && offset_step.is_finite()) {
        return Err(Error::InvalidConfig("offset_step must be positive".into()));
    }
    let groups = if base.compositional {
        Some(compositional_groups(base)?)
    } else {
        None
    };
    let mut layers = Vec::with_capacity(ranks.len());
    let mut offsets = Vec::with_capacity(ranks.len());
    for (l, &rank) in ranks.iter().enumerate() {
        let spec = PlantSpec {
            common_offset: base.common_offset + rank as f64 * offset_step,
            seed: seed::derive_indexed(base.seed, "layer", l as u64),
            ..base.clone()
        };
        offsets.push(spec.common_offset);
        let mut m = match &groups {
            Some((a, b)) => gen_compositional(&spec, a, b)?,
            None => gen_clusters(&spec)?,
        };
        m.meta_mut().insert("layer".to_string(), l.to_string());
        layers.push(m);
    }
    let planted_layer = (0..ranks.len()).min_by_key(|&l| (ranks[l], l)).unwrap_or(0);
    let expected_trend = ranks
        .windows(2)
        .map(|w| match w[1].cmp(&w[0]) {
            core::cmp::Ordering::Greater => 1,
            core::cmp::Ordering::Less => -1,
            core::cmp::Ordering::Equal => 0,
        })
        .collect();
    let (group_a, group_b) = match groups {
        Some((a, b)) => (Some(a), Some(b)),
        None => (None, None),
    };
    Ok((
        layers,
        LayerSeriesTruth {
            ranks: ranks.to_vec(),
            offsets,
            planted_layer,
            expected_trend,
            class_gap: base.class_gap,
            compositional: base.compositional,
            group_a,
            group_b,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn clusters_are_paired_balanced_and_deterministic() {
        let spec = PlantSpec::default();
        let m = gen_clusters(&spec).unwrap();
        assert_eq!(m.class_counts(), [100, 100]);
        assert_eq!(&m.pair_ids().unwrap()[..4], &[0, 0, 1, 1]);
        assert_eq!(&m.labels()[..4], &[1, 0, 1, 0]);
        assert_eq!(m, gen_clusters(&spec).unwrap());
    }

    #[test]
    fn redundancy_expands_planted_columns() {
        let spec = PlantSpec {
            d_dims: 8,
            signal_idx: vec![2, 5],
            redundancy: 3,
            ..PlantSpec::default()
        };
        assert_eq!(
            spec.planted_columns().unwrap().as_slice(),
            &[0, 1, 2, 3, 4, 5]
        );
        let too_many = PlantSpec {
            redundancy: 5,
            ..spec
        };
        assert!(too_many.planted_columns().is_err());
    }

    #[test]
    fn compositional_rejects_overlap() {
        let spec = PlantSpec::default();
        let a = NeuronSet::from(vec![0, 1]);
        let b = NeuronSet::from(vec![1, 2]);
        assert_eq!(
            gen_compositional(&spec, &a, &b),
            Err(Error::OverlappingGroups { index: 1 })
        );
        assert_eq!(
            gen_compositional(&spec, &NeuronSet::new(), &b),
            Err(Error::EmptyGroup)
        );
    }

    #[test]
    fn spec_validation() {
        assert!(PlantSpec {
            m_rows: 3,
            ..PlantSpec::default()
        }
        .validate()
        .is_err());
        assert!(PlantSpec {
            noise_sigma: 0.0,
            ..PlantSpec::default()
        }
        .validate()
        .is_err());
        assert!(PlantSpec {
            signal_idx: vec![16],
            ..PlantSpec::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn single_layer_series() {
        let (layers, truth) = gen_layer_series(&[0], &PlantSpec::default(), 1.0).unwrap();
        assert_eq!(layers.len(), 1);
        assert_eq!(truth.planted_layer, 0);
        assert!(truth.expected_trend.is_empty());
        assert_eq!(layers[0].meta().get("layer").map(|s| s.as_str()), Some("0"));
    }
}
