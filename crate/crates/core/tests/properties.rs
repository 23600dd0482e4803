use std::path::Path;

use hecke_circle::arcs::{best_rational, classify, ArcClassification, ArcParams};
use hecke_circle::cli::cache::{decode, encode, Column};
use hecke_circle::cli::output::fmt_num;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cache_codec_round_trips(values in prop::collection::vec(any::<i128>(), 0..64), kind in "[a-z0-9]{1,12}") {
        let col = Column::I128(values);
        let bytes = encode(&kind, &col).unwrap();
        prop_assert_eq!(decode(&bytes, &kind, Path::new("mem")).unwrap(), col);
    }

    #[test]
    fn cache_rejects_any_single_bit_flip(values in prop::collection::vec(-1e6f64..1e6, 1..32), bit in any::<prop::sample::Index>()) {
        let bytes = encode("f", &Column::F64(values)).unwrap();
        let mut flipped = bytes.clone();
        let i = bit.index(bytes.len() * 8);
        flipped[i / 8] ^= 1 << (i % 8);
        prop_assert!(decode(&flipped, "f", Path::new("mem")).is_err());
    }

    #[test]
    fn numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn major_arc_centres_are_close_and_reduced(x in 0.0f64..1.0, n in 10_000u64..10_000_000) {
        let p = ArcParams::new(n, 0.1, 1.0).unwrap();
        if let ArcClassification::Major { a, q } = classify(x, &p) {
            prop_assert!(q as f64 <= p.p);
            prop_assert!((x - a as f64 / q as f64).abs() <= 1.0 / p.q + 1e-15);
            prop_assert_eq!(num_gcd(a, q), 1);
        }
        let (a, q) = best_rational(x, p.p_floor());
        prop_assert!(q >= 1 && q <= p.p_floor());
        let d = (x - a as f64 / q as f64).abs();
        prop_assert!(d <= 1.0 / (p.p_floor() + 1) as f64);
        for r in 1..=p.p_floor() {
            prop_assert!(d <= (x - (r as f64 * x).round() / r as f64).abs() + 1e-15, "q = {} beats {}", r, q);
        }
    }
}

fn num_gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { num_gcd(b, a % b) }
}
