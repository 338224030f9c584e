//! Histogram estimates of entropy and normalized mutual information between
//! neuron-group mean activations.
//!
//! Values are binned into `bins` equal-width bins spanning the observed
//! `[min, max]` of each variable. Entropies use the natural log.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LabeledMatrix, NeuronSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MiConfig {
    pub bins: usize,
}

impl Default for MiConfig {
    fn default() -> Self {
        Self { bins: 20 }
    }
}

impl MiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::InvalidConfig("bins must be at least 2".into()));
        }
        Ok(())
    }
}

/// Per-row mean over the columns in `set`.
pub fn group_mean_activation(m: &LabeledMatrix, set: &NeuronSet) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Err(Error::EmptyGroup);
    }
    set.check_bounds(m.cols())?;
    let n = set.len() as f64;
    Ok(m.data()
        .iter_rows()
        .map(|row| set.iter().map(|j| f64::from(row[j])).sum::<f64>() / n)
        .collect())
}

/// Bin index of every value; a constant input maps everything to bin 0.
fn bin_indices(values: &[f64], bins: usize) -> Vec<usize> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let width = hi - lo;
    values
        .iter()
        .map(|&v| {
            if width > 0.0 {
                let b = ((v - lo) / width * bins as f64) as usize;
                b.min(bins - 1)
            } else {
                0
            }
        })
        .collect()
}

fn entropy_from_counts(counts: &[usize], total: usize) -> f64 {
    let n = total as f64;
    let mut terms: Vec<f64> = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * libm::log(p)
        })
        .collect();
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

fn check_len(len: usize) -> Result<()> {
    if len < 2 {
        return Err(Error::TooFewRows {
            rows: len,
            required: 2,
        });
    }
    Ok(())
}

/// Plug-in Shannon entropy (nats) of the binned values.
pub fn entropy(values: &[f64], cfg: &MiConfig) -> Result<f64> {
    cfg.validate()?;
    check_len(values.len())?;
    let mut counts = vec![0usize; cfg.bins];
    for b in bin_indices(values, cfg.bins) {
        counts[b] += 1;
    }
    Ok(entropy_from_counts(&counts, values.len()))
}

/// Raw mutual information and both marginal entropies from the joint
/// histogram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    pub mutual_information: f64,
    pub entropy_a: f64,
    pub entropy_b: f64,
}

pub fn mutual_information(a: &[f64], b: &[f64], cfg: &MiConfig) -> Result<MiEstimate> {
    cfg.validate()?;
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: "b",
            expected: a.len(),
            found: b.len(),
        });
    }
    check_len(a.len())?;
    let bins = cfg.bins;
    let (ia, ib) = (bin_indices(a, bins), bin_indices(b, bins));
    let mut joint = vec![0usize; bins * bins];
    for (&x, &y) in ia.iter().zip(&ib) {
        joint[x * bins + y] += 1;
    }
    let mut pa = vec![0usize; bins];
    let mut pb = vec![0usize; bins];
    for x in 0..bins {
        for y in 0..bins {
            let c = joint[x * bins + y];
            pa[x] += c;
            pb[y] += c;
        }
    }
    let n = a.len() as f64;
    // Terms are sorted before summing so the result does not depend on
    // which argument comes first.
    let mut terms = Vec::new();
    for x in 0..bins {
        for y in 0..bins {
            let c = joint[x * bins + y];
            if c == 0 {
                continue;
            }
            let p = c as f64 / n;
            let marginal = (pa[x] as f64 / n) * (pb[y] as f64 / n);
            terms.push(p * libm::log(p / marginal));
        }
    }
    terms.sort_by(f64::total_cmp);
    Ok(MiEstimate {
        mutual_information: terms.iter().sum(),
        entropy_a: entropy_from_counts(&pa, a.len()),
        entropy_b: entropy_from_counts(&pb, b.len()),
    })
}

/// `I(A;B) / sqrt(H(A)·H(B))`, clamped at 0 from below.
pub fn normalized_mi(a: &[f64], b: &[f64], cfg: &MiConfig) -> Result<f64> {
    let est = mutual_information(a, b, cfg)?;
    if est.entropy_a == 0.0 || est.entropy_b == 0.0 {
        return Err(Error::DegenerateEntropy);
    }
    Ok((est.mutual_information / libm::sqrt(est.entropy_a * est.entropy_b)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use alloc::collections::BTreeMap;

    #[test]
    fn entropy_of_constant_and_uniform() {
        let cfg = MiConfig::default();
        assert_eq!(entropy(&[3.0; 10], &cfg), Ok(0.0));
        // 40 values, two per bin centre.
        let v: Vec<f64> = (0..40).map(|i| (i / 2) as f64 + 0.5).collect();
        let h = entropy(&v, &cfg).unwrap();
        assert!((h - libm::log(20.0)).abs() < 1e-12);
        assert!(entropy(&[1.0], &cfg).is_err());
    }

    #[test]
    fn self_information_and_degenerate_inputs() {
        let cfg = MiConfig::default();
        let a: Vec<f64> = (0..50).map(|i| libm::sin(i as f64)).collect();
        assert!((normalized_mi(&a, &a, &cfg).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(
            normalized_mi(&[2.0; 50], &a, &cfg),
            Err(Error::DegenerateEntropy)
        );
    }

    #[test]
    fn group_means() {
        let m = LabeledMatrix::new(
            Matrix::from_rows(&[[1.0f32, 2.0, 3.0], [4.0, 4.0, 4.0]]).unwrap(),
            vec![0, 1],
            None,
            BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(
            group_mean_activation(&m, &NeuronSet::from(vec![1])).unwrap(),
            vec![2.0, 4.0]
        );
        assert_eq!(
            group_mean_activation(&m, &NeuronSet::full(3)).unwrap(),
            vec![2.0, 4.0]
        );
        assert_eq!(
            group_mean_activation(&m, &NeuronSet::new()),
            Err(Error::EmptyGroup)
        );
    }
}
