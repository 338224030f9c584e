//! Supervised Compression-Decoupling Index (S-CDI) and its components.
//!
//! ```text
//! S-CDI(Z) = CDI(Z) * I_c(Z) / (1 - I_e(Z)),   CDI(Z) = R(Z) * O(Z)
//! ```
//!
//! * `R`   mean absolute Pearson correlation over all ordered column pairs,
//!   diagonal included, so `R ∈ [1/d, 1]`.
//! * `O`   mean absolute cosine similarity over unordered pairs of `k`
//!   sampled rows.
//! * `I_c` per-class mean cosine similarity over unordered within-class
//!   pairs, averaged over classes.
//! * `I_e` mean cosine similarity over cross-class pairs, averaged over
//!   ordered class pairs.
//!
//! Lower S-CDI marks a layer where the labeled signal is better decoupled.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LabeledMatrix, Matrix};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScdiConfig {
    /// Rows sampled for the orthogonality term; the effective count is
    /// `min(k_samples, M)`.
    pub k_samples: usize,
    pub seed: u64,
    /// `I_e >= 1 - entanglement_epsilon` is reported as saturated.
    pub entanglement_epsilon: f64,
}

impl Default for ScdiConfig {
    fn default() -> Self {
        Self {
            k_samples: 512,
            seed: 0,
            entanglement_epsilon: 1e-9,
        }
    }
}

impl ScdiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_samples < 2 {
            return Err(Error::InvalidConfig("k_samples must be at least 2".into()));
        }
        if self.entanglement_epsilon.is_nan() || self.entanglement_epsilon <= 0.0 {
            return Err(Error::InvalidConfig(
                "entanglement_epsilon must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScdiReport {
    #[serde(rename = "R")]
    pub redundancy: f64,
    #[serde(rename = "O")]
    pub orthogonality: f64,
    #[serde(rename = "I_c")]
    pub intra_compactness: f64,
    #[serde(rename = "I_e")]
    pub inter_entanglement: f64,
    #[serde(rename = "CDI")]
    pub cdi: f64,
    #[serde(rename = "SCDI")]
    pub scdi: f64,
    /// Rows per class, indexed by label.
    pub class_counts: [usize; 2],
}

impl ScdiReport {
    /// Combines precomputed components.
    pub fn from_components(
        redundancy: f64,
        orthogonality: f64,
        intra_compactness: f64,
        inter_entanglement: f64,
        entanglement_epsilon: f64,
        class_counts: [usize; 2],
    ) -> Result<Self> {
        if inter_entanglement >= 1.0 - entanglement_epsilon {
            return Err(Error::EntanglementSaturated { inter_entanglement });
        }
        let cdi = redundancy * orthogonality;
        Ok(Self {
            redundancy,
            orthogonality,
            intra_compactness,
            inter_entanglement,
            cdi,
            scdi: cdi * intra_compactness / (1.0 - inter_entanglement),
            class_counts,
        })
    }
}

/// Deviations from the mean, computed relative to the first element so that a
/// constant input yields exact zeros.
pub(crate) fn centered(values: impl ExactSizeIterator<Item = f64> + Clone) -> Vec<f64> {
    let n = values.len();
    let mut it = values.clone();
    let Some(x0) = it.next() else {
        return Vec::new();
    };
    let mean_shift = values.clone().map(|v| v - x0).sum::<f64>() / n as f64;
    values.map(|v| (v - x0) - mean_shift).collect()
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Feature redundancy `R`.
///
/// Columns with zero variance correlate 0 with every other column; the
/// diagonal always contributes 1.
pub fn feature_redundancy(z: &Matrix) -> Result<f64> {
    let (m, d) = (z.rows(), z.cols());
    if m < 2 {
        return Err(Error::TooFewRows {
            rows: m,
            required: 2,
        });
    }
    // Column-major centered copies with their sums of squares.
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|j| centered((0..m).map(|i| f64::from(z.get(i, j)))))
        .collect();
    let norms: Vec<f64> = cols.iter().map(|c| libm::sqrt(dot(c, c))).collect();

    let mut off_diagonal = 0.0;
    for i in 0..d {
        if norms[i] == 0.0 {
            continue;
        }
        for j in i + 1..d {
            if norms[j] == 0.0 {
                continue;
            }
            let rho = dot(&cols[i], &cols[j]) / (norms[i] * norms[j]);
            off_diagonal += libm::fabs(rho).min(1.0);
        }
    }
    let d = d as f64;
    Ok((d + 2.0 * off_diagonal) / (d * d))
}

/// L2-normalized copy of each listed row.
fn unit_rows(z: &Matrix, rows: &[usize]) -> Result<Vec<Vec<f64>>> {
    rows.iter()
        .map(|&i| {
            let v: Vec<f64> = z.row(i).iter().map(|&x| f64::from(x)).collect();
            let norm = libm::sqrt(dot(&v, &v));
            if norm == 0.0 {
                return Err(Error::ZeroNormRow { row: i });
            }
            Ok(v.into_iter().map(|x| x / norm).collect())
        })
        .collect()
}

/// Instance orthogonality `O` over `min(k_samples, M)` seeded row samples.
pub fn instance_orthogonality(z: &Matrix, cfg: &ScdiConfig) -> Result<f64> {
    cfg.validate()?;
    let m = z.rows();
    if m < 2 {
        return Err(Error::TooFewRows {
            rows: m,
            required: 2,
        });
    }
    let k = cfg.k_samples.min(m);
    let mut rng = seed::rng(cfg.seed);
    let mut sampled = rand::seq::index::sample(&mut rng, m, k).into_vec();
    sampled.sort_unstable();
    let units = unit_rows(z, &sampled)?;

    let mut total = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            total += libm::fabs(dot(&units[i], &units[j]));
        }
    }
    Ok(total / (k * (k - 1) / 2) as f64)
}

/// Per-class sums of unit row vectors plus the summed squared norms.
struct ClassSums {
    count: usize,
    sum: Vec<f64>,
    sq_norms: f64,
}

fn class_sums(z: &Matrix, labels: &[u8]) -> Result<[ClassSums; 2]> {
    if labels.len() != z.rows() {
        return Err(Error::LengthMismatch {
            what: "labels",
            expected: z.rows(),
            found: labels.len(),
        });
    }
    let d = z.cols();
    let mut sums = [0u8, 1].map(|_| ClassSums {
        count: 0,
        sum: vec![0.0; d],
        sq_norms: 0.0,
    });
    for (i, &label) in labels.iter().enumerate() {
        if label > 1 {
            return Err(Error::LabelOutOfRange {
                row: i,
                value: label,
            });
        }
        let row = z.row(i);
        let norm = libm::sqrt(row.iter().map(|&x| f64::from(x) * f64::from(x)).sum());
        if norm == 0.0 {
            return Err(Error::ZeroNormRow { row: i });
        }
        let s = &mut sums[usize::from(label)];
        s.count += 1;
        let mut sq = 0.0;
        for (acc, &x) in s.sum.iter_mut().zip(row) {
            let u = f64::from(x) / norm;
            *acc += u;
            sq += u * u;
        }
        s.sq_norms += sq;
    }
    Ok(sums)
}

/// Intra-class compactness `I_c`.
///
/// The sum over unordered within-class pairs is taken as
/// `(|Σ u_i|² - Σ |u_i|²) / 2` on unit rows `u_i`, so the cost is `O(M·d)`.
pub fn intra_class_compactness(z: &Matrix, labels: &[u8]) -> Result<f64> {
    let sums = class_sums(z, labels)?;
    let present: Vec<(u8, &ClassSums)> = (0u8..)
        .zip(sums.iter())
        .filter(|(_, s)| s.count > 0)
        .collect();
    if present.is_empty() {
        return Err(Error::TooFewRows {
            rows: 0,
            required: 2,
        });
    }
    let mut total = 0.0;
    for &(class, s) in &present {
        if s.count < 2 {
            return Err(Error::ClassTooSmall {
                class,
                count: s.count,
                required: 2,
            });
        }
        let pair_sum = (dot(&s.sum, &s.sum) - s.sq_norms) / 2.0;
        let pairs = (s.count * (s.count - 1) / 2) as f64;
        total += pair_sum / pairs;
    }
    Ok(total / present.len() as f64)
}

/// Inter-class entanglement `I_e`.
pub fn inter_class_entanglement(z: &Matrix, labels: &[u8]) -> Result<f64> {
    let [s0, s1] = class_sums(z, labels)?;
    if s0.count == 0 || s1.count == 0 {
        return Err(Error::SingleClass);
    }
    // With two classes both ordered pairs (0,1) and (1,0) give the same mean,
    // and the 1/(C(C-1)) weighting averages them.
    let cross = dot(&s0.sum, &s1.sum) / (s0.count * s1.count) as f64;
    Ok((cross + cross) / 2.0)
}

/// Full S-CDI report for one layer.
pub fn scdi(m: &LabeledMatrix, cfg: &ScdiConfig) -> Result<ScdiReport> {
    cfg.validate()?;
    let z = m.data();
    let labels = m.labels();
    let inter = inter_class_entanglement(z, labels)?;
    let intra = intra_class_compactness(z, labels)?;
    let redundancy = feature_redundancy(z)?;
    let orthogonality = instance_orthogonality(z, cfg)?;
    ScdiReport::from_components(
        redundancy,
        orthogonality,
        intra,
        inter,
        cfg.entanglement_epsilon,
        m.class_counts(),
    )
}
