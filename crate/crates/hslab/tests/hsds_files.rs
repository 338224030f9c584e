mod common;

use hslab::hsds::{decode, encode, read_hsds, write_hsds, HsdsError};
use hslab_core::seed;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn five_hundred_files_round_trip_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = seed::rng(2024);
    for i in 0..500 {
        let m = common::random_hsds(&mut rng);
        let a = dir.path().join(format!("{i}.hsds"));
        let b = dir.path().join(format!("{i}.copy.hsds"));
        write_hsds(&m, &a).unwrap();
        let back = read_hsds(&a).unwrap();
        assert_eq!(back, m, "file {i}");
        write_hsds(&back, &b).unwrap();
        assert_eq!(
            std::fs::read(&a).unwrap(),
            std::fs::read(&b).unwrap(),
            "file {i}"
        );
    }
}

#[test]
fn every_truncation_is_reported() {
    // Fewer than four bytes cannot carry the magic at all.
    let mut rng = seed::rng(3);
    for _ in 0..20 {
        let bytes = encode(&common::random_hsds(&mut rng)).unwrap();
        for cut in 0..bytes.len() {
            match decode(&bytes[..cut]) {
                Err(HsdsError::MagicMismatch { found }) if cut < 4 => {
                    assert_eq!(found, &bytes[..cut])
                }
                Err(HsdsError::TruncatedFile { len, .. }) if cut >= 4 => assert_eq!(len, cut),
                other => panic!("cut at {cut}: {other:?}"),
            }
        }
    }
}

#[test]
fn flipped_bytes_never_panic() {
    let mut rng = seed::rng(4);
    for _ in 0..200 {
        let mut bytes = encode(&common::random_hsds(&mut rng)).unwrap();
        for _ in 0..rng.random_range(1..4) {
            let i = rng.random_range(0..bytes.len());
            bytes[i] ^= 1 << rng.random_range(0..8);
        }
        if let Ok(m) = decode(&bytes) {
            // Anything accepted must itself be a valid, re-encodable file.
            assert_eq!(decode(&encode(&m).unwrap()).unwrap(), m);
        }
    }
}

#[test]
fn header_errors_are_named() {
    let mut rng = seed::rng(5);
    let good = encode(&common::random_hsds(&mut rng)).unwrap();
    let mut bad = good.clone();
    bad[0] = b'X';
    assert!(matches!(decode(&bad), Err(HsdsError::MagicMismatch { .. })));
    let mut bad = good.clone();
    bad[4] = 2;
    assert!(matches!(
        decode(&bad),
        Err(HsdsError::UnsupportedVersion { version: 2 })
    ));
    let mut bad = good.clone();
    bad[6] = 1;
    assert!(matches!(
        decode(&bad),
        Err(HsdsError::NonZeroPadding { offset: 6 })
    ));
    let mut bad = good;
    bad.extend_from_slice(&[0, 0]);
    assert!(matches!(
        decode(&bad),
        Err(HsdsError::TrailingData { extra: 2, .. })
    ));
    assert_eq!(decode(b"HSDS").unwrap_err().name(), "TruncatedFile");
}

proptest! {
    #[test]
    fn decode_inverts_encode(seed in any::<u64>()) {
        let m = common::random_hsds(&mut seed::rng(seed));
        let bytes = encode(&m).unwrap();
        let back = decode(&bytes).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(encode(&back).unwrap(), bytes);
    }

    #[test]
    fn arbitrary_bytes_are_rejected_without_panicking(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
        let _ = decode(&bytes);
    }
}
