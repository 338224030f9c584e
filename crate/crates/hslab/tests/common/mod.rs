#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use hslab_core::{LabeledMatrix, Matrix};
use rand::Rng;

/// A valid HSDS payload: at least one row and column, binary labels, finite
/// values, optional pair ids and a few metadata entries.
pub fn random_hsds(rng: &mut impl Rng) -> LabeledMatrix {
    let rows = rng.random_range(1..=40);
    let cols = rng.random_range(1..=12);
    let data: Vec<f32> = (0..rows * cols)
        .map(|_| match rng.random_range(0..10) {
            0 => 0.0,
            1 => -0.0,
            2 => f32::MAX * rng.random_range(-1.0f32..1.0),
            3 => f32::MIN_POSITIVE * rng.random_range(0.0f32..4.0),
            _ => rng.random_range(-50.0f32..50.0),
        })
        .collect();
    let labels = (0..rows).map(|_| rng.random_range(0..=1)).collect();
    let pairs = rng
        .random_bool(0.5)
        .then(|| (0..rows).map(|_| rng.random()).collect());
    let mut meta = BTreeMap::new();
    for k in 0..rng.random_range(0..4) {
        let value: String = (0..rng.random_range(0..8))
            .map(|_| char::from_u32(rng.random_range(0x20..0x3000)).unwrap_or('?'))
            .collect();
        meta.insert(format!("key{k}\"ü"), value);
    }
    LabeledMatrix::new(Matrix::new(rows, cols, data).unwrap(), labels, pairs, meta).unwrap()
}

pub fn hslab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hslab"))
        .args(args)
        .current_dir(cwd)
        .env_remove("HSLAB_THREADS")
        .output()
        .expect("hslab binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A small compositional layer series: 5 layers, planted layer at index 2.
pub fn write_series(dir: &Path, m_rows: usize) {
    let cfg = serde_json::json!({
        "kind": "series",
        "plant": {
            "m_rows": m_rows, "d_dims": 64, "class_gap": 6.0, "planted_center": -1.0,
            "signal_idx": (0..16).collect::<Vec<_>>(), "compositional": true, "seed": 5
        },
        "ranks": [1, 3, 0, 4, 2],
        "offset_step": 2.0
    });
    std::fs::write(dir.join("synth.json"), cfg.to_string()).unwrap();
    let out = hslab(
        &[
            "synth",
            "--config",
            "synth.json",
            "--out-dir",
            "fx",
            "--no-timestamp",
        ],
        dir,
    );
    assert!(out.status.success(), "{}", stderr(&out));
}
