//! Dense activation matrices, labels and neuron index sets.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major `rows × cols` matrix of `f32` activations.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        let expected = rows.checked_mul(cols).ok_or(Error::ShapeMismatch {
            expected: usize::MAX,
            found: data.len(),
        })?;
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    what: "row",
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f32 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.cols)
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    /// Copies the given rows, in the given order, into a new matrix.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    dim: self.rows,
                });
            }
            data.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.cols, data)
    }

    /// First non-finite entry, if any.
    pub fn find_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.cols, p % self.cols))
    }
}

/// One layer's hidden states with binary labels (1 = regret, 0 = non-regret),
/// optional pair ids grouping rows from the same question, and free-form
/// string metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    data: Matrix,
    labels: Vec<u8>,
    pair_ids: Option<Vec<u32>>,
    meta: BTreeMap<String, String>,
}

impl LabeledMatrix {
    /// Validates shapes, labels and finiteness.
    pub fn new(
        data: Matrix,
        labels: Vec<u8>,
        pair_ids: Option<Vec<u32>>,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        if labels.len() != data.rows() {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: data.rows(),
                found: labels.len(),
            });
        }
        if let Some((row, &value)) = labels.iter().enumerate().find(|(_, &l)| l > 1) {
            return Err(Error::LabelOutOfRange { row, value });
        }
        if let Some(ids) = &pair_ids {
            if ids.len() != data.rows() {
                return Err(Error::LengthMismatch {
                    what: "pair_ids",
                    expected: data.rows(),
                    found: ids.len(),
                });
            }
        }
        if let Some((row, col)) = data.find_non_finite() {
            return Err(Error::NonFiniteValue { row, col });
        }
        Ok(Self {
            data,
            labels,
            pair_ids,
            meta,
        })
    }

    pub fn data(&self) -> &Matrix {
        &self.data
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn pair_ids(&self) -> Option<&[u32]> {
        self.pair_ids.as_deref()
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut BTreeMap<String, String> {
        &mut self.meta
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.data.rows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.data.cols()
    }

    /// Row counts for class 0 and class 1.
    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }

    /// Keeps the given rows (labels and pair ids follow); metadata is copied.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let data = self.data.select_rows(indices)?;
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        let pair_ids = self
            .pair_ids
            .as_ref()
            .map(|ids| indices.iter().map(|&i| ids[i]).collect());
        Ok(Self {
            data,
            labels,
            pair_ids,
            meta: self.meta.clone(),
        })
    }

    /// Same rows and labels with the labels replaced.
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Self> {
        Self::new(
            self.data.clone(),
            labels,
            self.pair_ids.clone(),
            self.meta.clone(),
        )
    }

    pub(crate) fn data_mut(&mut self) -> &mut Matrix {
        &mut self.data
    }

    pub fn into_parts(self) -> (Matrix, Vec<u8>, Option<Vec<u32>>, BTreeMap<String, String>) {
        (self.data, self.labels, self.pair_ids, self.meta)
    }
}

/// Sorted, duplicate-free set of neuron (column) indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct NeuronSet(Vec<usize>);

impl NeuronSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn full(dim: usize) -> Self {
        Self((0..dim).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x <= y {
                        out.push(x);
                        a.next();
                        if x == y {
                            b.next();
                        }
                    } else {
                        out.push(y);
                        b.next();
                    }
                }
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    out.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Self(out)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.first_shared(other).is_none()
    }

    pub(crate) fn first_shared(&self, other: &Self) -> Option<usize> {
        self.0.iter().copied().find(|&i| other.contains(i))
    }

    /// Fails if any index is `>= dim`.
    pub fn check_bounds(&self, dim: usize) -> Result<()> {
        match self.0.last() {
            Some(&index) if index >= dim => Err(Error::IndexOutOfRange { index, dim }),
            _ => Ok(()),
        }
    }
}

impl From<Vec<usize>> for NeuronSet {
    fn from(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl From<NeuronSet> for Vec<usize> {
    fn from(s: NeuronSet) -> Self {
        s.0
    }
}

impl FromIterator<usize> for NeuronSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from(iter.into_iter().collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_bad_shapes_and_labels() {
        assert_eq!(Matrix::new(0, 3, vec![]), Err(Error::EmptyMatrix));
        assert!(matches!(
            Matrix::new(2, 2, vec![0.0; 3]),
            Err(Error::ShapeMismatch { .. })
        ));
        let m = Matrix::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert_eq!(
            LabeledMatrix::new(m.clone(), vec![0, 2], None, BTreeMap::new()),
            Err(Error::LabelOutOfRange { row: 1, value: 2 })
        );
        assert!(matches!(
            LabeledMatrix::new(m, vec![0, 1], Some(vec![1]), BTreeMap::new()),
            Err(Error::LengthMismatch { .. })
        ));
        let nan = Matrix::new(1, 2, vec![0.0, f32::NAN]).unwrap();
        assert_eq!(
            LabeledMatrix::new(nan, vec![0], None, BTreeMap::new()),
            Err(Error::NonFiniteValue { row: 0, col: 1 })
        );
    }

    #[test]
    fn neuron_set_is_sorted_and_unions() {
        let a = NeuronSet::from(vec![5, 1, 3, 1]);
        assert_eq!(a.as_slice(), &[1, 3, 5]);
        let b: NeuronSet = [2, 3, 9].into_iter().collect();
        assert_eq!(a.union(&b).as_slice(), &[1, 2, 3, 5, 9]);
        assert!(!a.is_disjoint(&b));
        assert_eq!(a.check_bounds(6), Ok(()));
        assert_eq!(
            a.check_bounds(5),
            Err(Error::IndexOutOfRange { index: 5, dim: 5 })
        );
    }
}
