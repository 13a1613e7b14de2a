use num_integer::Integer;
use proptest::prelude::*;
use theta_sums::exact::{dedekind_s, s_hk_naive, s_k_naive, t_hk_naive};
use theta_sums::fast::{s_hk_fast, s_k_fast, t_hk_closed, t_k_reduced};
use theta_sums::floor_sum::{floor_sum, FloorSumArgs};
use theta_sums::rational::Rational;
use theta_sums::scan::{Checkpoint, ChunkRecord, ScanKind};
use theta_sums::Error;

fn floor_sum_brute(n: u64, m: u64, a: i64, b: i64) -> i128 {
    (0..n as i128)
        .map(|i| Integer::div_floor(&(a as i128 * i + b as i128), &(m as i128)))
        .sum()
}

proptest! {
    #[test]
    fn floor_sum_matches_enumeration(
        n in 0u64..400,
        m in 1u64..400,
        a in -5000i64..5000,
        b in -5000i64..5000,
    ) {
        prop_assert_eq!(floor_sum(FloorSumArgs::new(n, m, a, b)).unwrap(), floor_sum_brute(n, m, a, b));
    }

    #[test]
    fn fast_s_hk_matches_enumeration(k in 1u64..2000, h_seed in any::<u64>()) {
        let h = h_seed % (3 * k) + 1;
        prop_assert_eq!(s_hk_fast(h, k).unwrap().value, s_hk_naive(h, k).unwrap().value);
    }

    #[test]
    fn closed_t_hk_matches_enumeration(k in 1u64..600, h_seed in any::<u64>()) {
        let h = h_seed % (4 * k) + 1;
        prop_assert_eq!(t_hk_closed(h, k).unwrap().value, t_hk_naive(h, k).unwrap().value);
    }

    #[test]
    fn s_k_has_parity_opposite_to_k(k in 1u64..1500) {
        let s = s_k_fast(k).unwrap().value;
        prop_assert_eq!(s, s_k_naive(k).unwrap().value);
        prop_assert_eq!((s + k as i64).rem_euclid(2), 1);
    }

    #[test]
    fn reduced_t_k_agrees_with_closed_form(k in 1u64..5000) {
        let reduced = t_k_reduced(k).unwrap().value;
        prop_assert_eq!(reduced, theta_sums::fast::t_k_closed(k).unwrap().value);
    }

    #[test]
    fn dedekind_reciprocity(c in 1u64..150, d in 1u64..150) {
        prop_assume!(c.gcd(&d) == 1);
        let lhs = dedekind_s(d as i64, c).unwrap().checked_add(dedekind_s(c as i64, d).unwrap()).unwrap();
        let (c, d) = (c as i128, d as i128);
        let rhs = Rational::new(c * c + d * d + 1, 12 * c * d)
            .unwrap()
            .checked_sub(Rational::new(1, 4).unwrap())
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn rational_string_round_trip(num in -1_000_000i128..1_000_000, den in 1i128..1_000_000) {
        let r = Rational::new(num, den).unwrap();
        let parsed: Rational = r.to_string().parse().unwrap();
        prop_assert_eq!(parsed, r);
        let json = serde_json::to_string(&r).unwrap();
        prop_assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), r);
    }

    #[test]
    fn checkpoint_bytes_round_trip(
        limit in 2u64..100_000,
        values in proptest::collection::btree_map(1u64..100_000, -1_000_000i64..1_000_000, 0..40),
    ) {
        let mut state = Checkpoint::new(ScanKind::Census, limit, false);
        state.chunks.push(ChunkRecord { chunk: 0, values: values.into_iter().collect() });
        let bytes = state.to_bytes();
        let back = Checkpoint::from_bytes(&bytes).unwrap();
        prop_assert_eq!(&back, &state);
        prop_assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn checkpoint_rejects_any_flipped_byte(pos_seed in any::<usize>()) {
        let mut state = Checkpoint::new(ScanKind::Thresholds, 5000, true);
        state.chunks.push(ChunkRecord { chunk: 0, values: vec![(2, 1), (3, 2), (5, 4)] });
        let mut bytes = state.to_bytes();
        let body_end = bytes[..bytes.len() - 1].iter().rposition(|&b| b == b'\n').unwrap();
        let pos = pos_seed % body_end;
        prop_assume!(bytes[pos] != b'\n');
        bytes[pos] ^= 0x01;
        let is_integrity_error = matches!(Checkpoint::from_bytes(&bytes), Err(Error::Integrity { .. }));
        prop_assert!(is_integrity_error);
    }
}
