//! Train/test splitting and regret/non-regret row pairing.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LabeledMatrix, Matrix};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub balanced: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            seed: 0,
            balanced: true,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Splits rows into `(train, test)`.
///
/// With `balanced`, each class contributes `floor(train_fraction * n_c)` rows
/// to the training set, chosen by a seeded shuffle within the class. Both
/// halves keep the original row order.
pub fn split(m: &LabeledMatrix, spec: &SplitSpec) -> Result<(LabeledMatrix, LabeledMatrix)> {
    spec.validate()?;
    let mut rng = seed::rng(spec.seed);
    let mut in_train = alloc::vec![false; m.rows()];

    if spec.balanced {
        for class in 0..=1u8 {
            let mut members: Vec<usize> =
                (0..m.rows()).filter(|&i| m.labels()[i] == class).collect();
            if members.len() < 2 {
                return Err(Error::ClassTooSmall {
                    class,
                    count: members.len(),
                    required: 2,
                });
            }
            let take = libm::floor(spec.train_fraction * members.len() as f64) as usize;
            members.shuffle(&mut rng);
            for &i in &members[..take] {
                in_train[i] = true;
            }
        }
    } else {
        let mut all: Vec<usize> = (0..m.rows()).collect();
        let take = libm::floor(spec.train_fraction * all.len() as f64) as usize;
        all.shuffle(&mut rng);
        for &i in &all[..take] {
            in_train[i] = true;
        }
    }

    let (train, test): (Vec<usize>, Vec<usize>) = (0..m.rows()).partition(|&i| in_train[i]);
    Ok((m.select_rows(&train)?, m.select_rows(&test)?))
}

/// Bookkeeping from [`pair_by_id`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingDiagnostics {
    /// Pair ids that lacked either a regret or a non-regret row.
    pub unmatched_pair_ids: usize,
    /// Rows ignored because an earlier row of the same id and label was used.
    pub duplicate_rows: usize,
}

/// Row-aligned regret / non-regret activations: row `i` of both matrices
/// comes from the same pair id.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedActivations {
    pub regret: Matrix,
    pub non_regret: Matrix,
    pub pair_ids: Vec<u32>,
    pub diagnostics: PairingDiagnostics,
}

impl PairedActivations {
    pub fn new(regret: Matrix, non_regret: Matrix) -> Result<Self> {
        if regret.rows() != non_regret.rows() || regret.cols() != non_regret.cols() {
            return Err(Error::ShapeMismatch {
                expected: regret.rows() * regret.cols(),
                found: non_regret.rows() * non_regret.cols(),
            });
        }
        let pair_ids = (0..regret.rows() as u32).collect();
        Ok(Self {
            regret,
            non_regret,
            pair_ids,
            diagnostics: PairingDiagnostics::default(),
        })
    }

    pub fn rows(&self) -> usize {
        self.regret.rows()
    }

    pub fn cols(&self) -> usize {
        self.regret.cols()
    }
}

/// Pairs the first regret row and the first non-regret row of every pair id.
///
/// Pairs are emitted in order of each id's first appearance in the matrix.
pub fn pair_by_id(m: &LabeledMatrix) -> Result<PairedActivations> {
    let ids = m.pair_ids().ok_or(Error::MissingPairIds)?;

    // id -> (first regret row, first non-regret row, first appearance)
    let mut slots: BTreeMap<u32, (Option<usize>, Option<usize>, usize)> = BTreeMap::new();
    let mut duplicate_rows = 0;
    for (row, (&id, &label)) in ids.iter().zip(m.labels()).enumerate() {
        let slot = slots.entry(id).or_insert((None, None, row));
        let target = if label == 1 { &mut slot.0 } else { &mut slot.1 };
        if target.is_some() {
            duplicate_rows += 1;
        } else {
            *target = Some(row);
        }
    }

    let mut matched: Vec<(usize, u32, usize, usize)> = Vec::new();
    let mut unmatched_pair_ids = 0;
    for (&id, &(r, n, first)) in &slots {
        match (r, n) {
            (Some(r), Some(n)) => matched.push((first, id, r, n)),
            _ => unmatched_pair_ids += 1,
        }
    }
    if matched.is_empty() {
        return Err(Error::NoPairs);
    }
    matched.sort_unstable_by_key(|&(first, ..)| first);

    let regret_rows: Vec<usize> = matched.iter().map(|&(_, _, r, _)| r).collect();
    let non_regret_rows: Vec<usize> = matched.iter().map(|&(_, _, _, n)| n).collect();
    Ok(PairedActivations {
        regret: m.data().select_rows(&regret_rows)?,
        non_regret: m.data().select_rows(&non_regret_rows)?,
        pair_ids: matched.iter().map(|&(_, id, _, _)| id).collect(),
        diagnostics: PairingDiagnostics {
            unmatched_pair_ids,
            duplicate_rows,
        },
    })
}
