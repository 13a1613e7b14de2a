use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{par_tally, Tally, VerificationReport};
use crate::error::{domain, Result};
use crate::exact::{s_hk_naive, s_k_naive, t_hk_naive, t_k_naive};
use crate::fast::{s_hk_fast, s_k_fast, t_hk_closed, t_k_closed};
use crate::floor_sum::{floor_sum, FloorSumArgs};

/// Pairwise closed forms for `T(h,k)` are compared up to this modulus.
pub const T_PAIR_CAP: u64 = 128;

/// Fast kernels against the enumeration oracles: `S(h,k)` for
/// `1 <= h <= k <= limit_pairs`, and `S(k)`, `T(k)` for `k <= limit_k`,
/// `T(h,k)` for `h < 2k`, `k <= min(limit_k, 128)`.
pub fn verify_fast_equivalence(limit_pairs: u64, limit_k: u64) -> Result<VerificationReport> {
    if limit_pairs < 1 || limit_k < 1 {
        return Err(domain("equivalence suite needs limits >= 1"));
    }
    let started = Instant::now();
    let pairs = par_tally((1..=limit_pairs).collect(), |&k, t: &mut Tally| {
        for h in 1..=k {
            match (s_hk_naive(h, k), s_hk_fast(h, k)) {
                (Ok(n), Ok(f)) => t.check_eq(|| format!("S(h,k) h={h} k={k}"), n.value, f.value),
                (n, f) => t.check(
                    false,
                    || format!("S({h},{k})"),
                    format!("{n:?}"),
                    format!("{f:?}"),
                ),
            }
        }
    });
    let singles = par_tally((1..=limit_k).collect(), |&k, t: &mut Tally| {
        match (s_k_naive(k), s_k_fast(k)) {
            (Ok(n), Ok(f)) => t.check_eq(|| format!("S(k) k={k}"), n.value, f.value),
            (n, f) => t.check(
                false,
                || format!("S({k})"),
                format!("{n:?}"),
                format!("{f:?}"),
            ),
        }
        match (t_k_naive(k), t_k_closed(k)) {
            (Ok(n), Ok(f)) => t.check_eq(|| format!("T(k) k={k}"), n.value, f.value),
            (n, f) => t.check(
                false,
                || format!("T({k})"),
                format!("{n:?}"),
                format!("{f:?}"),
            ),
        }
        if k <= T_PAIR_CAP {
            for h in 1..2 * k {
                match (t_hk_naive(h, k), t_hk_closed(h, k)) {
                    (Ok(n), Ok(f)) => {
                        t.check_eq(|| format!("T(h,k) h={h} k={k}"), n.value, f.value)
                    }
                    (n, f) => t.check(
                        false,
                        || format!("T({h},{k})"),
                        format!("{n:?}"),
                        format!("{f:?}"),
                    ),
                }
            }
        }
    });
    let tally = pairs.merge(singles);
    Ok(tally.into_report(
        "fast-equivalence",
        format!("pairs k<={limit_pairs}, single k<={limit_k}"),
        started,
    ))
}

/// `floor_sum` against direct summation on `count` pseudo-random tuples
/// with `0 <= n <= 1000`, `1 <= m <= 1000`, `|a|, |b| <= 1000`.
pub fn verify_floor_sum_random(count: u64, seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::default();
    for _ in 0..count {
        let n = rng.gen_range(0..=1000u64);
        let m = rng.gen_range(1..=1000u64);
        let a = rng.gen_range(-1000..=1000i64);
        let b = rng.gen_range(-1000..=1000i64);
        let brute: i128 = (0..n as i128)
            .map(|i| (a as i128 * i + b as i128).div_euclid(m as i128))
            .sum();
        tally.check_result(
            || format!("floor_sum(n={n}, m={m}, a={a}, b={b})"),
            brute,
            floor_sum(FloorSumArgs::new(n, m, a, b)),
        );
    }
    Ok(tally.into_report(
        "floor-sum-random",
        format!("{count} tuples, seed {seed}"),
        started,
    ))
}

/// `s_hk_fast = s_hk_naive` on `count` pseudo-random pairs with `k <= max_k`.
pub fn verify_random_pairs(count: u64, max_k: u64, seed: u64) -> Result<VerificationReport> {
    if max_k < 1 {
        return Err(domain("random pair suite needs max_k >= 1"));
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<(u64, u64)> = (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=max_k);
            let h = rng.gen_range(1..=k);
            (h, k)
        })
        .collect();
    let tally = par_tally(inputs, |&(h, k), t: &mut Tally| {
        match (s_hk_naive(h, k), s_hk_fast(h, k)) {
            (Ok(n), Ok(f)) => t.check_eq(|| format!("S(h,k) h={h} k={k}"), n.value, f.value),
            (n, f) => t.check(
                false,
                || format!("S({h},{k})"),
                format!("{n:?}"),
                format!("{f:?}"),
            ),
        }
    });
    Ok(tally.into_report(
        "random-pairs",
        format!("{count} pairs, k<={max_k}, seed {seed}"),
        started,
    ))
}
