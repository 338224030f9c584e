use std::collections::BTreeMap;

use hslab_core::mutual_info::{entropy, group_mean_activation, normalized_mi, MiConfig};
use hslab_core::{seed, Error, LabeledMatrix, Matrix, NeuronSet};
use rand::Rng;

/// Histogram entropy computed straight from the definition.
fn entropy_oracle(v: &[f64], bins: usize) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0usize; bins];
    for &x in v {
        let b = if hi > lo {
            (((x - lo) / (hi - lo)) * bins as f64).floor() as usize
        } else {
            0
        };
        counts[b.min(bins - 1)] += 1;
    }
    let n = v.len() as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

#[test]
fn entropy_matches_histogram_oracle() {
    let mut rng = seed::rng(3);
    for _ in 0..100 {
        let n = rng.random_range(2..500);
        let bins = rng.random_range(2..40);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let h = entropy(&v, &MiConfig { bins }).unwrap();
        assert!((h - entropy_oracle(&v, bins)).abs() < 1e-12);
    }
    let uniform: Vec<f64> = (0..200).map(|i| (i % 20) as f64 + 0.5).collect();
    assert!((entropy(&uniform, &MiConfig::default()).unwrap() - 20f64.ln()).abs() < 1e-12);
    assert_eq!(entropy(&[4.0; 9], &MiConfig::default()), Ok(0.0));
}

#[test]
fn independent_samples_have_small_mi() {
    let mut rng = seed::rng(10);
    let a: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
    let b: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
    let mi = normalized_mi(&a, &b, &MiConfig { bins: 20 }).unwrap();
    assert!(mi <= 0.05, "{mi}");
}

#[test]
fn self_information_is_one() {
    let mut rng = seed::rng(12);
    for _ in 0..50 {
        let a: Vec<f64> = (0..rng.random_range(2..400))
            .map(|_| rng.random_range(-5.0..5.0))
            .collect();
        if a.iter().all(|&x| x == a[0]) {
            continue;
        }
        let mi = normalized_mi(&a, &a, &MiConfig::default()).unwrap();
        assert!((mi - 1.0).abs() <= 1e-9, "{mi}");
    }
    let a = [1.0, 2.0, 3.0];
    assert_eq!(
        normalized_mi(&[0.0; 3], &a, &MiConfig::default()),
        Err(Error::DegenerateEntropy)
    );
    assert!(matches!(
        normalized_mi(&a, &a[..2], &MiConfig::default()),
        Err(Error::LengthMismatch { .. })
    ));
    assert!(MiConfig { bins: 1 }.validate().is_err());
}

#[test]
fn group_means_match_scalar_oracle() {
    let mut rng = seed::rng(6);
    let data: Vec<f32> = (0..60).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    let m = LabeledMatrix::new(
        Matrix::new(10, 6, data).unwrap(),
        vec![0, 1, 0, 1, 0, 1, 0, 1, 0, 1],
        None,
        BTreeMap::new(),
    )
    .unwrap();
    let set = NeuronSet::from(vec![0, 2, 5]);
    let means = group_mean_activation(&m, &set).unwrap();
    for (i, mean) in means.iter().enumerate() {
        let expect = (f64::from(m.data().get(i, 0))
            + f64::from(m.data().get(i, 2))
            + f64::from(m.data().get(i, 5)))
            / 3.0;
        assert!((mean - expect).abs() < 1e-12);
    }
    let single = group_mean_activation(&m, &NeuronSet::from(vec![4])).unwrap();
    assert!(single
        .iter()
        .zip(m.data().column(4))
        .all(|(&a, b)| a == f64::from(b)));
    assert!(matches!(
        group_mean_activation(&m, &NeuronSet::from(vec![6])),
        Err(Error::IndexOutOfRange { .. })
    ));
}
