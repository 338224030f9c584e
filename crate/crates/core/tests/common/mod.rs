//! Naive reference implementations and random fixtures shared by the
//! integration tests. Everything here is written for clarity over speed and
//! deliberately avoids the library's own helpers.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hslab_core::{LabeledMatrix, Matrix};
use rand::Rng;

pub fn rows_f64(z: &Matrix) -> Vec<Vec<f64>> {
    (0..z.rows())
        .map(|i| z.row(i).iter().map(|&x| f64::from(x)).collect())
        .collect()
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut ab = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for k in 0..a.len() {
        ab += a[k] * b[k];
        aa += a[k] * a[k];
        bb += b[k] * b[k];
    }
    ab / (aa.sqrt() * bb.sqrt())
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    if x.iter().all(|&v| v == x[0]) || y.iter().all(|&v| v == y[0]) {
        return 0.0;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn redundancy(z: &Matrix) -> f64 {
    let d = z.cols();
    let cols: Vec<Vec<f64>> = (0..d)
        .map(|j| z.column(j).into_iter().map(f64::from).collect())
        .collect();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            total += if i == j {
                1.0
            } else {
                pearson(&cols[i], &cols[j]).abs()
            };
        }
    }
    total / (d * d) as f64
}

/// Exhaustive orthogonality over every unordered row pair.
pub fn orthogonality(z: &Matrix) -> f64 {
    let rows = rows_f64(z);
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            total += cosine(&rows[i], &rows[j]).abs();
            pairs += 1;
        }
    }
    total / pairs as f64
}

pub fn intra(z: &Matrix, labels: &[u8]) -> f64 {
    let rows = rows_f64(z);
    let mut per_class = Vec::new();
    for class in 0..2u8 {
        let idx: Vec<usize> = (0..rows.len()).filter(|&i| labels[i] == class).collect();
        if idx.is_empty() {
            continue;
        }
        let mut total = 0.0;
        let mut pairs = 0usize;
        for a in 0..idx.len() {
            for b in a + 1..idx.len() {
                total += cosine(&rows[idx[a]], &rows[idx[b]]);
                pairs += 1;
            }
        }
        per_class.push(total / pairs as f64);
    }
    per_class.iter().sum::<f64>() / per_class.len() as f64
}

pub fn inter(z: &Matrix, labels: &[u8]) -> f64 {
    let rows = rows_f64(z);
    // Both ordered class pairs, weighted by 1 / (C (C - 1)).
    let mut total = 0.0;
    for (c1, c2) in [(0u8, 1u8), (1, 0)] {
        let mut sum = 0.0;
        let mut n = 0usize;
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                if labels[i] == c1 && labels[j] == c2 {
                    sum += cosine(&rows[i], &rows[j]);
                    n += 1;
                }
            }
        }
        total += sum / n as f64;
    }
    total / 2.0
}

pub struct OracleReport {
    pub r: f64,
    pub o: f64,
    pub ic: f64,
    pub ie: f64,
    pub cdi: f64,
    pub scdi: f64,
}

pub fn scdi(m: &LabeledMatrix) -> OracleReport {
    let z = m.data();
    let r = redundancy(z);
    let o = orthogonality(z);
    let ic = intra(z, m.labels());
    let ie = inter(z, m.labels());
    OracleReport {
        r,
        o,
        ic,
        ie,
        cdi: r * o,
        scdi: r * o * ic / (1.0 - ie),
    }
}

/// Random labeled matrix with `rows ∈ [4, max_rows]`, `cols ∈ [1, max_cols]`,
/// at least two rows per class and no zero rows. Roughly one matrix in five
/// gets a constant column.
pub fn random_labeled(rng: &mut impl Rng, max_rows: usize, max_cols: usize) -> LabeledMatrix {
    let m = rng.random_range(4..=max_rows);
    let d = rng.random_range(1..=max_cols);
    let mut data: Vec<f32> = (0..m * d).map(|_| rng.random_range(-3.0f32..3.0)).collect();
    if d > 1 && rng.random_bool(0.2) {
        let j = rng.random_range(0..d);
        let c = rng.random_range(-2.0f32..2.0);
        for i in 0..m {
            data[i * d + j] = c;
        }
    }
    for i in 0..m {
        if data[i * d..(i + 1) * d].iter().all(|&x| x == 0.0) {
            data[i * d] = 1.0;
        }
    }
    let mut labels: Vec<u8> = (0..m).map(|i| u8::from(i % 2 == 0)).collect();
    // Shuffle while keeping both classes populated.
    for i in (1..m).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }
    LabeledMatrix::new(
        Matrix::new(m, d, data).unwrap(),
        labels,
        None,
        BTreeMap::new(),
    )
    .unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
